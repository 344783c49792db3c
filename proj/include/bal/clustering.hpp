#ifndef BAL_CLUSTERING_HPP
#define BAL_CLUSTERING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bal/featio.hpp"
#include "bal/matrix.hpp"

namespace bal {

struct Clustering {
    Matrix centroids;  // k x D
    std::vector<std::uint32_t> assignments;
    double inertia = 0.0;
    std::size_t iterations = 0;
    // Inertia after each assignment step, in order.
    std::vector<double> inertia_history;

    std::size_t k() const { return centroids.rows(); }
};

struct KMeansOptions {
    std::size_t k = 2;
    std::uint64_t seed = 0;
    std::size_t max_iter = 300;
    // Convergence threshold on the largest centroid displacement.
    double tol = 1e-4;
};

// Squared Euclidean distance with f64 accumulation in dimension order.
double squared_distance(std::span<const float> f, std::span<const double> c);

// Lloyd iterations from a seeded k-means++ start.
Clustering kmeans_fit(const FeatureMatrix& m, const KMeansOptions& options);

// Lloyd iterations from caller-supplied initial centroids.
Clustering kmeans_fit_from(const FeatureMatrix& m, Matrix initial, std::size_t max_iter, double tol);

// Seeded k-means++ seeding only.
Matrix kmeans_plus_plus(const FeatureMatrix& m, std::size_t k, std::uint64_t seed);

// Nearest centroid per row; ties go to the lowest centroid id.
std::vector<std::uint32_t> assign(const FeatureMatrix& m, const Matrix& centroids);

}  // namespace bal

#endif  // BAL_CLUSTERING_HPP
