#pragma once

#include <cstddef>
#include <vector>

#include "exposure/matrix.hpp"

namespace exposure {

struct PcaModel {
    std::vector<double> mean;
    Matrix components;                // k x d, orthonormal rows
    std::vector<double> eigenvalues;  // descending, clamped at 0
    double total_variance = 0.0;      // trace of the covariance matrix
    std::vector<std::size_t> iterations;  // power iterations spent per component
};

struct PcaOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 10'000;
};

// Top-k principal components of the rows of `data` (covariance divisor n-1),
// found by power iteration with deflation. Each component is signed so that
// its largest-magnitude coordinate is positive. Throws DimensionError when
// k is outside [1, min(rows, cols)] or there are fewer than two rows, and
// ConvergenceError when a component needs more than `max_iterations`.
PcaModel pca_fit(const Matrix& data, std::size_t k, const PcaOptions& options = {});

// (row - mean) projected onto the components: n x k.
Matrix pca_transform(const PcaModel& model, const Matrix& rows);

// Inverse of pca_transform: mean + coordinates * components.
Matrix pca_reconstruct(const PcaModel& model, const Matrix& coordinates);

}  // namespace exposure
