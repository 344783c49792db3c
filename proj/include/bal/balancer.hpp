#ifndef BAL_BALANCER_HPP
#define BAL_BALANCER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bal/cdd.hpp"
#include "bal/featio.hpp"
#include "bal/oracle.hpp"
#include "bal/pool.hpp"
#include "bal/samplers.hpp"
#include "bal/taskmodel.hpp"

namespace bal {

// Cycle-2 sub-pool and the rows the sampler picked from it for one
// candidate balancing factor.
struct CandidateTrial {
    std::size_t index = 0;
    double beta = 1.0;
    SubPool pool;
    Selection selection;
    // Rows added from outside the window to cover a shortfall.
    std::vector<std::size_t> topped_up;

    // selection.indices followed by topped_up.
    std::vector<std::size_t> rows() const;
};

struct BetaSearchReport {
    std::vector<double> candidates;
    std::vector<double> accuracies;
    double chosen = 1.0;
    std::size_t chosen_index = 0;
    // Candidates dropped for violating beta * N / I >= K.
    std::vector<double> infeasible;
    // One per evaluated candidate, same order as `candidates`.
    std::vector<CandidateTrial> trials;
};

// Index of the best accuracy; ties go to the smallest beta.
std::size_t best_candidate(std::span<const double> candidates, std::span<const double> accuracies);

// {0.6, 0.8, 1.0, 1.3, 1.6, 2.0} minus values below K*I/N. Empty when
// K*I >= N.
std::vector<double> default_candidates(std::size_t budget, std::size_t cycles, std::size_t n);

struct BetaSearchContext {
    const SortedPool* sorted = nullptr;
    // State after cycle 1.
    const LabelState* labels = nullptr;
    std::size_t budget = 0;
    std::size_t cycles = 0;
    const FeatureMatrix* features = nullptr;
    SamplerKind sampler = SamplerKind::Confidence;
    // Cycle-1 model; its posteriors drive the sampler for every candidate.
    const TaskModel* cycle1_model = nullptr;
    std::uint64_t seed = 0;
};

using CandidateFitness = std::function<double(const CandidateTrial&)>;

// Builds the cycle-2 sub-pool and selection for one candidate.
CandidateTrial run_candidate(const BetaSearchContext& ctx, std::size_t index, double beta);

// Evaluates every feasible candidate with `fitness` and picks the argmax.
BetaSearchReport choose_beta(const BetaSearchContext& ctx, std::span<const double> candidates,
                             const CandidateFitness& fitness);

// Settings for the model-based fitness.
struct TrialTraining {
    const TaskModel* prototype = nullptr;
    LabelOracle* oracle = nullptr;
    // Share of the cycle-1 labels held out for scoring the candidates.
    double eval_split = 0.2;
    std::uint64_t seed = 0;
};

// Fitness of a candidate: a fresh model trained on the cycle-1 labels
// minus a held-out validation share, plus the candidate's selection, scored
// on that held-out share. Reveals the candidate's rows to the oracle.
CandidateFitness trial_fitness(const BetaSearchContext& ctx, const TrialTraining& training);

// Validation rows carved from the cycle-1 labels (at least one row, and at
// least one row left for training).
std::vector<std::size_t> validation_rows(std::span<const std::size_t> labeled, double eval_split,
                                         std::uint64_t seed);

}  // namespace bal

#endif  // BAL_BALANCER_HPP
