#ifndef BAL_ORCHESTRATOR_HPP
#define BAL_ORCHESTRATOR_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bal/balancer.hpp"
#include "bal/cdd.hpp"
#include "bal/clustering.hpp"
#include "bal/featio.hpp"
#include "bal/pool.hpp"
#include "bal/samplers.hpp"
#include "bal/taskmodel.hpp"

namespace bal {

struct RunConfig {
    std::size_t cycles = 8;
    // Rows labeled per cycle.
    std::size_t budget = 50;
    // Defaults to the class count of the pool.
    std::optional<std::size_t> clusters;
    Metric metric = Metric::Cdd;
    Direction direction = Direction::Ascending;
    SamplerKind sampler = SamplerKind::Confidence;
    // Empty means search over beta_candidates after cycle 1.
    std::optional<double> beta;
    // Empty means default_candidates().
    std::vector<double> beta_candidates;
    TaskModelSpec model;
    TrainMode train_mode = TrainMode::Warm;
    std::uint64_t seed = 0;
    double eval_split = 0.2;
    // Also label every losing candidate's selection during the search.
    bool commit_all_candidates = false;
    std::size_t kmeans_max_iter = 300;
    double kmeans_tol = 1e-4;

    // Throws InvalidArgument unless the config can run on a pool of n rows.
    void validate(std::size_t n) const;
};

struct CycleRecord {
    std::size_t cycle = 0;
    std::size_t labeled_count = 0;
    double lambda = 0.0;
    double accuracy = 0.0;
    double train_accuracy = 0.0;
    bool degenerate = false;
};

struct RunState {
    LabelState labels;
    std::vector<CycleRecord> cycles;
    std::vector<double> accuracy_trace;
    std::optional<BetaSearchReport> beta_report;
    double beta = 1.0;
    std::size_t pool_size = 0;
    // Extra rows labeled by commit_all_candidates.
    std::vector<std::size_t> search_labels;
    // Rows whose labels were requested from the oracle, search included.
    std::size_t oracle_queries = 0;
};

// Per-purpose seed derived from the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose);

// Full selection loop: cluster, score, sort, label the head of the sorted
// pool, search beta if requested, then sub-pool / sample / label / train
// for the remaining cycles. `features` must carry labels; they reach the
// loop only through a LabelOracle. Accuracy is measured on `eval` when
// given, otherwise on the whole pool.
RunState run_bal(const RunConfig& config, const FeatureMatrix& features, const FeatureMatrix* eval = nullptr);

// The same loop over a caller-supplied sorted pool.
RunState run_with_order(const RunConfig& config, const FeatureMatrix& features, const SortedPool& sorted,
                        const FeatureMatrix* eval = nullptr);

// Uniform random selection from all unlabeled rows every cycle.
RunState run_baseline_random(const RunConfig& config, const FeatureMatrix& features,
                             const FeatureMatrix* eval = nullptr);

}  // namespace bal

#endif  // BAL_ORCHESTRATOR_HPP
