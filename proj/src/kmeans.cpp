#include "exposure/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "exposure/errors.hpp"
#include "exposure/rng.hpp"

namespace exposure {

namespace {

struct Assignment {
    std::vector<std::size_t> labels;
    std::vector<double> distances;  // squared distance to the assigned centroid
};

Assignment assign(const Matrix& points, const Matrix& centroids) {
    Assignment a;
    a.labels.resize(points.rows());
    a.distances.resize(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        std::size_t best = 0;
        double best_d = squared_distance(points.row(i), centroids.row(0));
        for (std::size_t j = 1; j < centroids.rows(); ++j) {
            const double dj = squared_distance(points.row(i), centroids.row(j));
            if (dj < best_d) {
                best_d = dj;
                best = j;
            }
        }
        a.labels[i] = best;
        a.distances[i] = best_d;
    }
    return a;
}

// Every empty cluster takes over the point farthest from its centroid among
// clusters that can spare one, and moves its centroid onto that point.
void repair_empty(const Matrix& points, Matrix& centroids, Assignment& a) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t l : a.labels) ++sizes[l];
    for (std::size_t j = 0; j < k; ++j) {
        if (sizes[j] != 0) continue;
        std::size_t pick = points.rows();
        double far = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (sizes[a.labels[i]] > 1 && a.distances[i] > far) {
                far = a.distances[i];
                pick = i;
            }
        }
        if (pick == points.rows()) break;  // cannot happen while k <= n
        --sizes[a.labels[pick]];
        ++sizes[j];
        a.labels[pick] = j;
        a.distances[pick] = 0.0;
        std::copy(points.row(pick).begin(), points.row(pick).end(), centroids.row(j).begin());
    }
}

double total(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

Matrix seed_centroids(const Matrix& points, std::size_t k, SplitMix64& rng) {
    const std::size_t n = points.rows();
    Matrix c(k, points.cols());
    std::vector<bool> chosen(n, false);
    std::size_t first = static_cast<std::size_t>(rng.below(n));
    chosen[first] = true;
    std::copy(points.row(first).begin(), points.row(first).end(), c.row(0).begin());

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points.row(i), c.row(0));

    // Greedy variant: several D^2-weighted candidates per centre, keep the one
    // that lowers the potential most.
    const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
    std::vector<double> trial_d2(n);
    for (std::size_t j = 1; j < k; ++j) {
        const double sum = total(d2);
        std::size_t pick = n;
        if (sum > 0.0) {
            double best_potential = std::numeric_limits<double>::infinity();
            std::vector<double> best_d2;
            for (std::size_t t = 0; t < trials; ++t) {
                const double target = rng.uniform() * sum;
                std::size_t candidate = n;
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (d2[i] <= 0.0) continue;
                    acc += d2[i];
                    candidate = i;
                    if (acc > target) break;
                }
                for (std::size_t i = 0; i < n; ++i)
                    trial_d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(candidate)));
                const double potential = total(trial_d2);
                if (potential < best_potential) {
                    best_potential = potential;
                    best_d2 = trial_d2;
                    pick = candidate;
                }
            }
            d2 = std::move(best_d2);
        } else {
            rng.next();  // keep the stream position independent of the data
            for (std::size_t i = 0; i < n && pick == n; ++i) {
                if (!chosen[i]) pick = i;
            }
        }
        chosen[pick] = true;
        std::copy(points.row(pick).begin(), points.row(pick).end(), c.row(j).begin());
    }
    return c;
}

}  // namespace

KMeansModel kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (k == 0) throw DimensionError("kmeans: k must be at least 1");
    if (n == 0 || d == 0) throw DimensionError("kmeans: no points");
    if (k > n) throw InsufficientPointsError("kmeans: k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " points");
    for (double x : points.data()) {
        if (!std::isfinite(x)) throw DimensionError("kmeans: non-finite coordinate");
    }

    SplitMix64 rng(seed);
    KMeansModel model;
    model.k = k;
    model.seed = seed;

    Matrix centroids = seed_centroids(points, k, rng);
    Assignment a = assign(points, centroids);
    repair_empty(points, centroids, a);
    model.inertia_history.push_back(total(a.distances));

    for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
        Matrix next(k, d);
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = next.row(a.labels[i]);
            const auto p = points.row(i);
            for (std::size_t c = 0; c < d; ++c) row[c] += p[c];
            ++sizes[a.labels[i]];
        }
        double movement = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            auto row = next.row(j);
            for (double& x : row) x /= static_cast<double>(sizes[j]);
            movement = std::max(movement, std::sqrt(squared_distance(row, centroids.row(j))));
        }
        centroids = std::move(next);
        a = assign(points, centroids);
        repair_empty(points, centroids, a);
        model.inertia_history.push_back(total(a.distances));
        model.iterations = iter;
        if (movement < options.movement_tolerance) break;
    }

    model.centroids = std::move(centroids);
    model.assignments = std::move(a.labels);
    model.inertia = model.inertia_history.back();
    return model;
}

KSelection select_k_detailed(const Matrix& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed) {
    if (k_min < 1) throw DimensionError("select_k: k_min must be at least 1");
    if (k_max < k_min) throw DimensionError("select_k: empty k range");
    if (k_max > points.rows())
        throw InsufficientPointsError("select_k: k_max exceeds the number of points");

    KSelection sel;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KMeansModel best;
        for (std::size_t r = 0; r < kSelectKRestarts; ++r) {
            KMeansModel m = kmeans(points, k, derive_seed(seed, k, r));
            if (r == 0 || m.inertia < best.inertia) best = std::move(m);
        }
        sel.candidates.push_back(k);
        sel.best_inertia.push_back(best.inertia);
        sel.best_models.push_back(std::move(best));
    }

    sel.k = k_min;
    double best_d2 = 0.0;
    const auto& in = sel.best_inertia;
    for (std::size_t i = 1; i + 1 < in.size(); ++i) {
        const double d2 = in[i - 1] - 2.0 * in[i] + in[i + 1];
        if (d2 > best_d2) {
            best_d2 = d2;
            sel.k = sel.candidates[i];
        }
    }
    return sel;
}

std::size_t select_k(const Matrix& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed) {
    return select_k_detailed(points, k_min, k_max, seed).k;
}

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) throw DimensionError("adjusted_rand_index: label vectors differ in length");
    const double n = static_cast<double>(a.size());
    if (a.size() < 2) return 1.0;
    std::map<std::pair<std::size_t, std::size_t>, double> joint;
    std::map<std::size_t, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++joint[{a[i], b[i]}];
        ++ra[a[i]];
        ++rb[b[i]];
    }
    auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [key, v] : joint) index += c2(v);
    for (const auto& [key, v] : ra) sa += c2(v);
    for (const auto& [key, v] : rb) sb += c2(v);
    const double expected = sa * sb / c2(n);
    const double max_index = 0.5 * (sa + sb);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

}  // namespace exposure
