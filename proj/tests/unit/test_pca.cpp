#include <doctest.h>

#include <cmath>
#include <random>

#include "exposure/errors.hpp"
#include "exposure/pca.hpp"
#include "oracles.hpp"

using namespace exposure;

namespace {

using Rows = std::vector<std::vector<double>>;

Rows random_rows(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.2, 3.0);
    std::vector<double> s(d);
    for (auto& x : s) x = scale(rng);
    // Mix columns so the covariance is not diagonal.
    std::vector<std::vector<double>> mix(d, std::vector<double>(d));
    for (auto& row : mix)
        for (auto& x : row) x = g(rng);
    Rows rows(n, std::vector<double>(d, 0.0));
    for (auto& r : rows) {
        std::vector<double> z(d);
        for (std::size_t j = 0; j < d; ++j) z[j] = g(rng) * s[j];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) r[i] += mix[i][j] * z[j];
    }
    return rows;
}

double reconstruction_error(const PcaModel& model, const Matrix& data) {
    const Matrix back = pca_reconstruct(model, pca_transform(model, data));
    double err = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) err += squared_distance(data.row(i), back.row(i));
    return err;
}

}  // namespace

TEST_CASE("rank-one data on the line y = 2x") {
    Rows rows;
    for (int x = 0; x < 6; ++x) rows.push_back({double(x), 2.0 * x});
    const Matrix data = Matrix::from_rows(rows);
    const auto model = pca_fit(data, 2);
    CHECK(model.components(0, 0) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(model.components(0, 1) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(std::abs(model.eigenvalues[1]) < 1e-9);
    CHECK(std::abs(dot(model.components.row(0), model.components.row(1))) < 1e-8);

    const Matrix coords = pca_transform(model, data);
    for (int x = 0; x < 6; ++x) CHECK(coords(x, 0) == doctest::Approx(std::sqrt(5.0) * (x - 2.5)).epsilon(1e-12));

    const Matrix mean_row = Matrix::from_rows({model.mean});
    const Matrix at_mean = pca_transform(model, mean_row);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(at_mean(0, j)) < 1e-12);
}

TEST_CASE("full-rank basis reconstructs exactly") {
    std::mt19937_64 rng(1);
    for (std::size_t d = 1; d <= 5; ++d) {
        const Matrix data = Matrix::from_rows(random_rows(rng, d + 4, d));
        const auto model = pca_fit(data, d);
        CHECK(reconstruction_error(model, data) < 1e-8);
    }
}

TEST_CASE("oracle equivalence on 50 random matrices up to 5x5") {
    std::mt19937_64 rng(20240601);
    int compared = 0, attempts = 0;
    double worst_value = 0.0, worst_vector = 0.0, worst_ortho = 0.0;
    while (compared < 50 && attempts < 500) {
        ++attempts;
        const std::size_t d = 1 + compared % 5;
        const Rows rows = random_rows(rng, d + 3 + rng() % 6, d);
        const auto cov = oracle::covariance(rows);
        const auto ref = oracle::eigenvalues(cov);
        if (!ref) continue;  // roots too close to separate on the grid; draw again
        const auto model = pca_fit(Matrix::from_rows(rows), d);
        for (std::size_t i = 0; i < d; ++i) {
            const double scale = std::max(1.0L, (*ref)[0]);
            worst_value = std::max(worst_value, double(std::fabs(model.eigenvalues[i] - (*ref)[i]) / scale));
            const auto v = oracle::null_vector(cov, (*ref)[i]);
            for (std::size_t j = 0; j < d; ++j)
                worst_vector = std::max(worst_vector, double(std::fabs(model.components(i, j) - v[j])));
            for (std::size_t j = 0; j < d; ++j) {
                const double expect = i == j ? 1.0 : 0.0;
                worst_ortho = std::max(worst_ortho,
                                       std::abs(dot(model.components.row(i), model.components.row(j)) - expect));
            }
        }
        ++compared;
    }
    CHECK(compared == 50);
    CHECK(worst_value < 1e-6);
    CHECK(worst_vector < 1e-6);
    CHECK(worst_ortho < 1e-8);
}

TEST_CASE("property: variance bound and reconstruction error non-increasing in k") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = 2 + trial % 5;
        const Matrix data = Matrix::from_rows(random_rows(rng, 12, d));
        double prev_err = INFINITY;
        for (std::size_t k = 1; k <= d; ++k) {
            const auto model = pca_fit(data, k);
            double explained = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                CHECK(model.eigenvalues[i] >= 0.0);
                if (i > 0) CHECK(model.eigenvalues[i] <= model.eigenvalues[i - 1]);
                explained += model.eigenvalues[i];
            }
            CHECK(explained <= model.total_variance + 1e-8);
            const double err = reconstruction_error(model, data);
            CHECK(err <= prev_err + 1e-9);
            prev_err = err;
        }
    }
}

TEST_CASE("wide data with more columns than rows") {
    std::mt19937_64 rng(5);
    const Matrix data = Matrix::from_rows(random_rows(rng, 4, 12));
    const auto model = pca_fit(data, 4);
    CHECK(model.components.rows() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(dot(model.components.row(i), model.components.row(j)) == doctest::Approx(i == j ? 1.0 : 0.0));
    // Four centred points span at most three directions.
    CHECK(model.eigenvalues[3] < 1e-9);
}

TEST_CASE("deterministic across runs") {
    std::mt19937_64 rng(8);
    const Matrix data = Matrix::from_rows(random_rows(rng, 10, 4));
    const auto a = pca_fit(data, 3);
    const auto b = pca_fit(data, 3);
    CHECK(a.components == b.components);
    CHECK(a.eigenvalues == b.eigenvalues);
}

TEST_CASE("errors") {
    std::mt19937_64 rng(9);
    const Matrix data = Matrix::from_rows(random_rows(rng, 10, 5));
    CHECK_THROWS_AS(pca_fit(data, 0), DimensionError);
    CHECK_THROWS_AS(pca_fit(data, 6), DimensionError);
    CHECK_THROWS_AS(pca_fit(Matrix::from_rows({{1.0, 2.0}}), 1), DimensionError);
    PcaOptions tight;
    tight.max_iterations = 2;
    CHECK_THROWS_AS(pca_fit(data, 5, tight), ConvergenceError);
    const auto model = pca_fit(data, 2);
    CHECK_THROWS_AS(pca_transform(model, Matrix(3, 4)), DimensionError);
}
