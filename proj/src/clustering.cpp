#include "bal/clustering.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace bal {

namespace {

void check_fit_args(const FeatureMatrix& m, std::size_t k) {
    if (m.n_rows == 0) throw InvalidArgument("k-means on an empty matrix");
    if (k == 0) throw InvalidArgument("k-means needs k >= 1");
    if (k > m.n_rows) {
        throw InvalidArgument("k = " + std::to_string(k) + " exceeds row count " + std::to_string(m.n_rows));
    }
}

// Assignment step; returns inertia under the given centroids.
double assign_rows(const FeatureMatrix& m, const Matrix& centroids, std::vector<std::uint32_t>& out,
                   std::vector<double>* row_distance = nullptr) {
    out.resize(m.n_rows);
    if (row_distance) row_distance->resize(m.n_rows);
    double inertia = 0.0;
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        const auto f = m.row(i);
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_j = 0;
        for (std::size_t j = 0; j < centroids.rows(); ++j) {
            const double d = squared_distance(f, centroids.row(j));
            if (d < best) {
                best = d;
                best_j = static_cast<std::uint32_t>(j);
            }
        }
        out[i] = best_j;
        if (row_distance) (*row_distance)[i] = best;
        inertia += best;
    }
    return inertia;
}

}  // namespace

double squared_distance(std::span<const float> f, std::span<const double> c) {
    double acc = 0.0;
    for (std::size_t d = 0; d < f.size(); ++d) {
        const double diff = static_cast<double>(f[d]) - c[d];
        acc += diff * diff;
    }
    return acc;
}

std::vector<std::uint32_t> assign(const FeatureMatrix& m, const Matrix& centroids) {
    if (centroids.rows() == 0) throw InvalidArgument("assign needs at least one centroid");
    if (centroids.cols() != m.n_cols) {
        throw InvalidArgument("centroid dimension " + std::to_string(centroids.cols()) +
                              " does not match feature dimension " + std::to_string(m.n_cols));
    }
    std::vector<std::uint32_t> out;
    assign_rows(m, centroids, out);
    return out;
}

Matrix kmeans_plus_plus(const FeatureMatrix& m, std::size_t k, std::uint64_t seed) {
    check_fit_args(m, k);
    std::mt19937_64 rng(seed);
    Matrix centroids(k, m.n_cols);
    std::vector<bool> chosen(m.n_rows, false);

    auto take = [&](std::size_t j, std::size_t row) {
        chosen[row] = true;
        const auto f = m.row(row);
        std::copy(f.begin(), f.end(), centroids.row(j).begin());
    };

    take(0, std::uniform_int_distribution<std::size_t>(0, m.n_rows - 1)(rng));
    std::vector<double> nearest(m.n_rows, std::numeric_limits<double>::infinity());
    for (std::size_t j = 1; j < k; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < m.n_rows; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(m.row(i), centroids.row(j - 1)));
            total += nearest[i];
        }
        std::size_t pick = m.n_rows;
        if (total > 0.0) {
            const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            double acc = 0.0;
            for (std::size_t i = 0; i < m.n_rows; ++i) {
                if (nearest[i] <= 0.0) continue;
                acc += nearest[i];
                pick = i;
                if (acc > r) break;
            }
        }
        if (pick == m.n_rows) {
            // All remaining mass is zero: duplicates only.
            pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
        }
        take(j, pick);
    }
    return centroids;
}

Clustering kmeans_fit_from(const FeatureMatrix& m, Matrix initial, std::size_t max_iter, double tol) {
    check_fit_args(m, initial.rows());
    if (initial.cols() != m.n_cols) throw InvalidArgument("initial centroid dimension mismatch");
    if (max_iter == 0) throw InvalidArgument("max_iter must be >= 1");
    if (!(tol >= 0.0)) throw InvalidArgument("tol must be >= 0");

    const std::size_t k = initial.rows();
    const std::size_t dim = m.n_cols;
    Clustering result;
    result.centroids = std::move(initial);
    std::vector<double> row_distance;
    std::vector<double> sums(k * dim);
    std::vector<std::size_t> counts(k);

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        result.inertia_history.push_back(assign_rows(m, result.centroids, result.assignments, &row_distance));
        result.iterations = iter;

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < m.n_rows; ++i) {
            const auto j = result.assignments[i];
            const auto f = m.row(i);
            for (std::size_t d = 0; d < dim; ++d) sums[j * dim + d] += f[d];
            ++counts[j];
        }

        Matrix updated(k, dim);
        std::vector<bool> reseeded(m.n_rows, false);
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] > 0) {
                for (std::size_t d = 0; d < dim; ++d) {
                    updated(j, d) = sums[j * dim + d] / static_cast<double>(counts[j]);
                }
                continue;
            }
            // Empty cluster: move it onto the row farthest from its centroid.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < m.n_rows; ++i) {
                if (!reseeded[i] && row_distance[i] > far_d) {
                    far_d = row_distance[i];
                    far = i;
                }
            }
            reseeded[far] = true;
            const auto f = m.row(far);
            std::copy(f.begin(), f.end(), updated.row(j).begin());
        }

        double shift = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = updated(j, d) - result.centroids(j, d);
                s += diff * diff;
            }
            shift = std::max(shift, s);
        }
        result.centroids = std::move(updated);
        if (shift == 0.0 || shift < tol * tol) break;
    }

    result.inertia = assign_rows(m, result.centroids, result.assignments);
    result.inertia_history.push_back(result.inertia);
    return result;
}

Clustering kmeans_fit(const FeatureMatrix& m, const KMeansOptions& options) {
    return kmeans_fit_from(m, kmeans_plus_plus(m, options.k, options.seed), options.max_iter, options.tol);
}

}  // namespace bal
