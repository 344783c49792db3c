#include "bal/cdd.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace bal {

const char* to_string(Metric metric) {
    return metric == Metric::Cdd ? "cdd" : "nearest";
}

const char* to_string(Direction direction) {
    return direction == Direction::Ascending ? "ascending" : "descending";
}

Metric parse_metric(const std::string& s) {
    if (s == "cdd") return Metric::Cdd;
    if (s == "nearest" || s == "nearest_distance") return Metric::NearestDistance;
    throw InvalidArgument("unknown metric '" + s + "'");
}

Direction parse_direction(const std::string& s) {
    if (s == "ascending" || s == "asc") return Direction::Ascending;
    if (s == "descending" || s == "desc") return Direction::Descending;
    throw InvalidArgument("unknown direction '" + s + "'");
}

NearestPair two_nearest(std::span<const float> f, const Matrix& centroids) {
    if (centroids.cols() != f.size()) {
        throw InvalidArgument("feature dimension " + std::to_string(f.size()) + " does not match centroid dimension " +
                              std::to_string(centroids.cols()));
    }
    NearestPair p;
    p.d1 = std::numeric_limits<double>::infinity();
    p.d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centroids.rows(); ++j) {
        const double d = squared_distance(f, centroids.row(j));
        if (d < p.d1) {
            p.d2 = p.d1;
            p.d1 = d;
            p.nearest = static_cast<std::uint32_t>(j);
        } else if (d < p.d2) {
            p.d2 = d;
        }
    }
    return p;
}

double cdd_score(std::span<const float> f, const Matrix& centroids) {
    if (centroids.rows() < 2) throw InvalidArgument("cluster distance difference needs at least two centroids");
    const auto p = two_nearest(f, centroids);
    return p.d2 - p.d1;
}

double nearest_distance_score(std::span<const float> f, const Matrix& centroids) {
    if (centroids.rows() == 0) throw InvalidArgument("nearest distance needs at least one centroid");
    return two_nearest(f, centroids).d1;
}

std::vector<double> score_rows(const FeatureMatrix& m, const Matrix& centroids, Metric metric) {
    std::vector<double> scores(m.n_rows);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        scores[i] = metric == Metric::Cdd ? cdd_score(m.row(i), centroids)
                                          : nearest_distance_score(m.row(i), centroids);
    }
    return scores;
}

SortedPool sort_scores(std::vector<double> scores, Metric metric, Direction direction) {
    SortedPool pool;
    pool.metric = metric;
    pool.direction = direction;
    pool.order.resize(scores.size());
    std::iota(pool.order.begin(), pool.order.end(), std::size_t{0});
    const bool ascending = direction == Direction::Ascending;
    std::sort(pool.order.begin(), pool.order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return ascending ? scores[a] < scores[b] : scores[a] > scores[b];
        return a < b;
    });
    pool.scores = std::move(scores);
    return pool;
}

SortedPool sort_pool(const FeatureMatrix& m, const Clustering& c, Metric metric, Direction direction) {
    if (c.centroids.cols() != m.n_cols) throw InvalidArgument("clustering was fitted on a different dimension");
    return sort_scores(score_rows(m, c.centroids, metric), metric, direction);
}

std::string format_score_csv(const SortedPool& pool) {
    std::vector<std::size_t> rank(pool.size());
    for (std::size_t p = 0; p < pool.size(); ++p) rank[pool.order[p]] = p;
    std::string out = "row_index,score,rank\n";
    char buf[64];
    for (std::size_t i = 0; i < pool.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", pool.scores[i]);
        out += std::to_string(i) + ',' + buf + ',' + std::to_string(rank[i]) + '\n';
    }
    return out;
}

SortedPool parse_score_csv(const std::string& text, Metric metric, Direction direction) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("row_index,score,rank", 0) != 0) {
        throw FormatError(FormatErrorKind::BadMagic, "score CSV must start with header row_index,score,rank");
    }
    std::vector<std::size_t> rows;
    std::vector<double> scores;
    std::vector<std::size_t> ranks;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
            throw FormatError(FormatErrorKind::RaggedRow, "score CSV line '" + line + "'");
        }
        try {
            rows.push_back(std::stoull(a));
            scores.push_back(std::stod(b));
            ranks.push_back(std::stoull(c));
        } catch (const std::exception&) {
            throw FormatError(FormatErrorKind::NonNumeric, "score CSV line '" + line + "'");
        }
    }
    const std::size_t n = rows.size();
    SortedPool pool;
    pool.metric = metric;
    pool.direction = direction;
    pool.scores.assign(n, 0.0);
    pool.order.assign(n, n);
    std::vector<bool> seen_row(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i] >= n || ranks[i] >= n || seen_row[rows[i]] || pool.order[ranks[i]] != n) {
            throw FormatError(FormatErrorKind::LabelMismatch, "score CSV rows/ranks are not a permutation");
        }
        seen_row[rows[i]] = true;
        pool.scores[rows[i]] = scores[i];
        pool.order[ranks[i]] = rows[i];
    }
    return pool;
}

}  // namespace bal
