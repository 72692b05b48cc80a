#include "exposure/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exposure/errors.hpp"
#include "exposure/rng.hpp"

namespace exposure {

namespace {

constexpr std::uint64_t kStartSeed = 0x5043415354415254ULL;

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

void scale(std::vector<double>& v, double s) {
    for (double& x : v) x *= s;
}

// Removes the projection of v onto every row of `basis` (twice, for
// numerical safety).
void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
            const double p = dot(v, b);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
        }
    }
}

void fix_sign(std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    if (v[best] < 0.0) scale(v, -1.0);
}

std::vector<double> multiply(const Matrix& a, const std::vector<double>& v) {
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) out[r] = dot(a.row(r), v);
    return out;
}

// Unit vector orthogonal to `basis`, taken from the standard basis vector
// with the largest residual. Used when the deflated matrix is zero.
std::vector<double> complement_vector(std::size_t d, const std::vector<std::vector<double>>& basis) {
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> e(d, 0.0);
        e[i] = 1.0;
        orthogonalize(e, basis);
        const double n = norm(e);
        if (n > best_norm + 1e-12) {
            best_norm = n;
            best = std::move(e);
        }
    }
    scale(best, 1.0 / best_norm);
    return best;
}

}  // namespace

PcaModel pca_fit(const Matrix& data, std::size_t k, const PcaOptions& options) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    if (n < 2) throw DimensionError("pca_fit needs at least two rows");
    if (k < 1 || k > std::min(n, d))
        throw DimensionError("pca_fit: k must lie in [1, min(rows, columns)]");
    for (double x : data.data()) {
        if (!std::isfinite(x)) throw DimensionError("pca_fit: non-finite input");
    }

    PcaModel model;
    model.mean.assign(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) model.mean[c] += data(r, c);
    }
    for (double& m : model.mean) m /= static_cast<double>(n);

    Matrix cov(d, d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = data(r, i) - model.mean[i];
            if (xi == 0.0) continue;
            for (std::size_t j = i; j < d; ++j) cov(i, j) += xi * (data(r, j) - model.mean[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov(i, j) /= static_cast<double>(n - 1);
            cov(j, i) = cov(i, j);
        }
        model.total_variance += cov(i, i);
    }

    // Anything below this is treated as an exactly zero eigenvalue.
    const double zero_level = 1e-14 * std::max(1.0, model.total_variance);

    Matrix work = cov;
    std::vector<std::vector<double>> found;
    std::vector<double> values;
    SplitMix64 rng(kStartSeed);

    for (std::size_t comp = 0; comp < k; ++comp) {
        std::vector<double> v(d);
        for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
        orthogonalize(v, found);
        double len = norm(v);
        if (len < 1e-8) {
            v = complement_vector(d, found);
        } else {
            scale(v, 1.0 / len);
        }

        std::size_t iter = 0;
        bool degenerate = false;
        for (;; ++iter) {
            if (iter >= options.max_iterations)
                throw ConvergenceError("pca_fit: component " + std::to_string(comp) + " did not converge within " +
                                       std::to_string(options.max_iterations) + " iterations");
            std::vector<double> w = multiply(work, v);
            orthogonalize(w, found);
            len = norm(w);
            if (len <= zero_level) {
                degenerate = true;
                break;
            }
            scale(w, 1.0 / len);
            fix_sign(w);
            double change = 0.0;
            for (std::size_t i = 0; i < d; ++i) change = std::max(change, std::abs(w[i] - v[i]));
            v = std::move(w);
            if (change < options.tolerance) break;
        }
        if (degenerate) v = complement_vector(d, found);
        fix_sign(v);

        double lambda = dot(v, multiply(cov, v));
        if (lambda < 0.0) lambda = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) work(i, j) -= lambda * v[i] * v[j];
        }
        found.push_back(v);
        values.push_back(lambda);
        model.iterations.push_back(iter);
    }

    // Power iteration already yields descending order; the sort only settles
    // near-ties deterministically (larger first-differing coordinate first).
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    const double tie = 1e-12 * std::max(1.0, model.total_variance);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (std::abs(values[a] - values[b]) > tie) return values[a] > values[b];
        return std::lexicographical_compare(found[b].begin(), found[b].end(), found[a].begin(), found[a].end());
    });

    model.components = Matrix(k, d);
    for (std::size_t r = 0; r < k; ++r) {
        const auto& src = found[order[r]];
        std::copy(src.begin(), src.end(), model.components.row(r).begin());
        model.eigenvalues.push_back(values[order[r]]);
    }
    std::vector<std::size_t> its(k);
    for (std::size_t r = 0; r < k; ++r) its[r] = model.iterations[order[r]];
    model.iterations = std::move(its);
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& rows) {
    const std::size_t d = model.mean.size();
    if (rows.cols() != d) throw DimensionError("pca_transform: column count does not match the model");
    const std::size_t k = model.components.rows();
    Matrix out(rows.rows(), k);
    std::vector<double> centered(d);
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        for (std::size_t c = 0; c < d; ++c) centered[c] = rows(r, c) - model.mean[c];
        for (std::size_t j = 0; j < k; ++j) out(r, j) = dot(centered, model.components.row(j));
    }
    return out;
}

Matrix pca_reconstruct(const PcaModel& model, const Matrix& coordinates) {
    const std::size_t k = model.components.rows();
    if (coordinates.cols() != k) throw DimensionError("pca_reconstruct: column count does not match the model");
    const std::size_t d = model.mean.size();
    Matrix out(coordinates.rows(), d);
    for (std::size_t r = 0; r < coordinates.rows(); ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            double s = model.mean[c];
            for (std::size_t j = 0; j < k; ++j) s += coordinates(r, j) * model.components(j, c);
            out(r, c) = s;
        }
    }
    return out;
}

}  // namespace exposure
