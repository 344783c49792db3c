#include "bal/balancer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bal {

std::vector<std::size_t> CandidateTrial::rows() const {
    std::vector<std::size_t> out = selection.indices;
    out.insert(out.end(), topped_up.begin(), topped_up.end());
    return out;
}

std::size_t best_candidate(std::span<const double> candidates, std::span<const double> accuracies) {
    if (candidates.empty()) throw InvalidArgument("no balancing-factor candidates");
    if (candidates.size() != accuracies.size()) throw InvalidArgument("one accuracy per candidate required");
    std::size_t best = 0;
    for (std::size_t j = 1; j < candidates.size(); ++j) {
        if (accuracies[j] > accuracies[best] ||
            (accuracies[j] == accuracies[best] && candidates[j] < candidates[best])) {
            best = j;
        }
    }
    return best;
}

std::vector<double> default_candidates(std::size_t budget, std::size_t cycles, std::size_t n) {
    static constexpr double kGrid[] = {0.6, 0.8, 1.0, 1.3, 1.6, 2.0};
    std::vector<double> out;
    if (budget * cycles >= n) return out;
    for (double beta : kGrid) {
        if (beta_feasible(beta, budget, cycles, n)) out.push_back(beta);
    }
    return out;
}

CandidateTrial run_candidate(const BetaSearchContext& ctx, std::size_t index, double beta) {
    CandidateTrial trial;
    trial.index = index;
    trial.beta = beta;
    trial.pool = make_subpool(*ctx.sorted, 2, ctx.cycles, beta, *ctx.labels, ctx.budget);

    Matrix probs;
    SamplerInputs in;
    in.members = trial.pool.members;
    in.features = ctx.features;
    in.seed = ctx.seed;
    if (needs_posteriors(ctx.sampler)) {
        if (!ctx.cycle1_model) throw InvalidArgument("uncertainty sampler needs the cycle-1 model");
        probs = ctx.cycle1_model->predict_proba(*ctx.features, trial.pool.members);
        in.probs = &probs;
    }
    trial.selection = sample(ctx.sampler, in, ctx.budget);
    if (trial.selection.shortfall > 0) {
        trial.topped_up =
            top_up(*ctx.sorted, trial.pool.window, *ctx.labels, trial.selection.indices, trial.selection.shortfall);
    }
    return trial;
}

BetaSearchReport choose_beta(const BetaSearchContext& ctx, std::span<const double> candidates,
                             const CandidateFitness& fitness) {
    if (candidates.empty()) throw InvalidArgument("no balancing-factor candidates");
    BetaSearchReport report;
    for (double beta : candidates) {
        if (beta_feasible(beta, ctx.budget, ctx.cycles, ctx.sorted->size())) {
            report.candidates.push_back(beta);
        } else {
            report.infeasible.push_back(beta);
        }
    }
    if (report.candidates.empty()) {
        throw InvalidArgument("every balancing-factor candidate is below the feasibility floor K*I/N");
    }
    for (std::size_t j = 0; j < report.candidates.size(); ++j) {
        report.trials.push_back(run_candidate(ctx, j, report.candidates[j]));
        report.accuracies.push_back(fitness(report.trials.back()));
    }
    report.chosen_index = best_candidate(report.candidates, report.accuracies);
    report.chosen = report.candidates[report.chosen_index];
    return report;
}

std::vector<std::size_t> validation_rows(std::span<const std::size_t> labeled, double eval_split,
                                         std::uint64_t seed) {
    if (labeled.size() < 2) throw InvalidArgument("need at least two labeled rows to hold out a validation split");
    if (!(eval_split > 0.0 && eval_split < 1.0)) throw InvalidArgument("eval_split must lie in (0, 1)");
    const auto want = static_cast<std::size_t>(std::llround(eval_split * static_cast<double>(labeled.size())));
    const std::size_t count = std::clamp<std::size_t>(want, 1, labeled.size() - 1);
    std::vector<std::size_t> rows(labeled.begin(), labeled.end());
    std::sort(rows.begin(), rows.end());
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(count);
    std::sort(rows.begin(), rows.end());
    return rows;
}

CandidateFitness trial_fitness(const BetaSearchContext& ctx, const TrialTraining& training) {
    if (!training.prototype || !training.oracle) throw InvalidArgument("trial training needs a model and an oracle");
    auto held_out = validation_rows(ctx.labels->labeled(), training.eval_split, training.seed);
    std::vector<std::size_t> base;
    for (std::size_t r : ctx.labels->labeled()) {
        if (!std::binary_search(held_out.begin(), held_out.end(), r)) base.push_back(r);
    }
    return [&ctx, training, held_out = std::move(held_out), base = std::move(base)](const CandidateTrial& trial) {
        std::vector<std::size_t> rows = base;
        const auto picked = trial.rows();
        training.oracle->reveal(picked);
        rows.insert(rows.end(), picked.begin(), picked.end());
        const auto labels = training.oracle->labels_for(rows);

        auto model = training.prototype->fresh();
        TrainRequest req;
        req.features = ctx.features;
        req.rows = rows;
        req.labels = labels;
        req.class_count = training.oracle->class_count();
        req.cycle = 2;
        req.candidate = trial.index;
        model->train(req);
        const auto held_labels = training.oracle->labels_for(held_out);
        return model->evaluate(*ctx.features, held_out, held_labels);
    };
}

}  // namespace bal
