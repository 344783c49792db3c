#ifndef BAL_CDD_HPP
#define BAL_CDD_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bal/clustering.hpp"
#include "bal/featio.hpp"
#include "bal/matrix.hpp"

namespace bal {

enum class Metric { Cdd, NearestDistance };
enum class Direction { Ascending, Descending };

const char* to_string(Metric metric);
const char* to_string(Direction direction);
Metric parse_metric(const std::string& s);
Direction parse_direction(const std::string& s);

// Smallest and second-smallest squared distances from a row to the
// centroids. With a single centroid d2 is +inf.
struct NearestPair {
    double d1 = 0.0;
    double d2 = 0.0;
    std::uint32_t nearest = 0;
};

NearestPair two_nearest(std::span<const float> f, const Matrix& centroids);

// d2 - d1 over squared distances; zero on the boundary between the two
// nearest centroids. Needs at least two centroids.
double cdd_score(std::span<const float> f, const Matrix& centroids);

// d1, the squared distance to the nearest centroid.
double nearest_distance_score(std::span<const float> f, const Matrix& centroids);

// Pool rows ordered by score. order[p] is the original row at sorted
// position p; scores are indexed by original row.
struct SortedPool {
    std::vector<std::size_t> order;
    std::vector<double> scores;
    Metric metric = Metric::Cdd;
    Direction direction = Direction::Ascending;

    std::size_t size() const { return order.size(); }
};

// Stable sort of the given per-row scores; equal scores keep ascending
// row order regardless of direction.
SortedPool sort_scores(std::vector<double> scores, Metric metric, Direction direction);

std::vector<double> score_rows(const FeatureMatrix& m, const Matrix& centroids, Metric metric);

SortedPool sort_pool(const FeatureMatrix& m, const Clustering& c, Metric metric, Direction direction);

// CSV with header row_index,score,rank; one line per row in row order.
std::string format_score_csv(const SortedPool& pool);
// Rebuilds a pool from format_score_csv output.
SortedPool parse_score_csv(const std::string& text, Metric metric, Direction direction);

}  // namespace bal

#endif  // BAL_CDD_HPP
