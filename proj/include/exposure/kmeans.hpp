#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "exposure/matrix.hpp"

namespace exposure {

struct KMeansModel {
    std::size_t k = 0;
    Matrix centroids;                      // k x d
    std::vector<std::size_t> assignments;  // one per point, in [0, k)
    double inertia = 0.0;                  // sum of squared distances to the assigned centroid
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::vector<double> inertia_history;   // after seeding and after every Lloyd iteration
};

struct KMeansOptions {
    std::size_t max_iterations = 300;
    double movement_tolerance = 1e-9;
};

// k-means++ seeding (SplitMix64 stream from `seed`) followed by Lloyd
// iterations. Empty clusters claim the point farthest from its centroid;
// distance ties go to the lowest cluster index. Throws
// InsufficientPointsError when k exceeds the number of points and
// DimensionError for k = 0, empty or non-finite input.
KMeansModel kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

inline constexpr std::size_t kSelectKRestarts = 5;

struct KSelection {
    std::size_t k = 0;
    std::vector<std::size_t> candidates;   // k_min..k_max
    std::vector<double> best_inertia;      // aligned with candidates
    std::vector<KMeansModel> best_models;  // aligned with candidates
};

// Best-of-5 restarts per k, then the elbow: argmax over interior k of
// I(k-1) - 2 I(k) + I(k+1). With no interior candidate, or when no second
// difference is positive, k_min is returned. Ties go to the smaller k.
KSelection select_k_detailed(const Matrix& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed);

std::size_t select_k(const Matrix& points, std::size_t k_min, std::size_t k_max, std::uint64_t seed);

// Adjusted Rand index between two labelings of the same points.
double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

}  // namespace exposure
