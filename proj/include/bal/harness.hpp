#ifndef BAL_HARNESS_HPP
#define BAL_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bal/cdd.hpp"
#include "bal/featio.hpp"
#include "bal/matrix.hpp"
#include "bal/orchestrator.hpp"

namespace bal {

// Isotropic Gaussian mixture with one component per class.
struct MixtureSpec {
    std::size_t classes = 10;
    std::size_t per_class = 200;
    std::size_t dim = 16;
    double spread = 1.0;
    // Centers are uniform in [-separation, separation]^dim.
    double separation = 4.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// The class centers a given spec draws, C x D.
Matrix synth_centers(const MixtureSpec& spec);

// classes * per_class labeled rows in a seeded shuffled order.
FeatureMatrix synth_generate(const MixtureSpec& spec);

// Sorted pool holding a seeded random permutation; every score is 0.
SortedPool random_order_pool(std::size_t n, std::uint64_t seed);

// Normalized entropy of a class histogram: H / log C, in [0, 1].
double normalized_class_entropy(const std::vector<std::size_t>& histogram);

// Per-cycle class balance of the rows each cycle selected.
std::vector<double> subpool_class_balance(const RunState& run, const FeatureMatrix& labeled);

struct ComparisonRow {
    std::size_t cycle = 0;
    double lambda = 0.0;
    double accuracy_a = 0.0;
    double accuracy_b = 0.0;
    double delta = 0.0;  // a - b
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    double final_delta = 0.0;

    std::string to_csv() const;
};

// Per-cycle accuracy differences. Throws when the runs have different
// cycle counts or label fractions.
ComparisonTable compare_runs(const RunState& a, const RunState& b);
ComparisonTable compare_traces(const std::vector<CycleRecord>& a, const std::vector<CycleRecord>& b);

}  // namespace bal

#endif  // BAL_HARNESS_HPP
