#ifndef BAL_TEST_UTIL_HPP
#define BAL_TEST_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "bal/featio.hpp"
#include "bal/matrix.hpp"

namespace bal::test {

inline FeatureMatrix make_matrix(std::size_t rows, std::size_t cols, std::vector<float> data) {
    FeatureMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.data = std::move(data);
    return m;
}

inline FeatureMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -5.0,
                                   double hi = 5.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    FeatureMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.data.resize(rows * cols);
    for (float& v : m.data) v = static_cast<float>(u(rng));
    return m;
}

inline Matrix random_centroids(std::size_t k, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Matrix c(k, cols);
    for (double& v : c.values()) v = u(rng);
    return c;
}

// Random probability rows; `ties` quantizes values so equal scores occur.
inline Matrix random_probs(std::size_t rows, std::size_t classes, std::uint64_t seed, bool ties = false) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> q(1, 4);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Matrix p(rows, classes);
    for (std::size_t r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
            p(r, c) = ties ? static_cast<double>(q(rng)) : u(rng);
            sum += p(r, c);
        }
        for (std::size_t c = 0; c < classes; ++c) p(r, c) /= sum;
    }
    return p;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("bal_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace bal::test

#endif  // BAL_TEST_UTIL_HPP
