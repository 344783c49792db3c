#include "bal/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bal/oracle.hpp"

namespace bal {

namespace {

enum SeedPurpose : std::uint64_t {
    kSeedKMeans = 1,
    kSeedValidation = 2,
    kSeedBaseline = 3,
    kSeedSampler = 100,
};

// Measures accuracy against labels the selection loop never reads.
class Evaluator {
public:
    explicit Evaluator(const FeatureMatrix& m) : m_(m) {
        if (!m.labels) throw InvalidArgument("evaluation matrix carries no labels");
        rows_.resize(m.n_rows);
        std::iota(rows_.begin(), rows_.end(), std::size_t{0});
    }

    double operator()(const TaskModel& model) const { return model.evaluate(m_, rows_, *m_.labels); }

private:
    const FeatureMatrix& m_;
    std::vector<std::size_t> rows_;
};

struct Loop {
    const RunConfig& config;
    FeatureMatrix pool;
    LabelOracle oracle;
    Evaluator evaluator;
    std::unique_ptr<TaskModel> model;
    RunState state;

    Loop(const RunConfig& c, const FeatureMatrix& features, const FeatureMatrix* eval)
        : config(c),
          pool(features.without_labels()),
          oracle(LabelOracle::from_matrix(features)),
          evaluator(eval ? *eval : features),
          model(make_task_model(c.model)) {
        config.validate(features.n_rows);
        if (eval && eval->n_cols != features.n_cols) throw InvalidArgument("evaluation matrix dimension mismatch");
        state.pool_size = features.n_rows;
        state.labels = LabelState(features.n_rows);
    }

    std::size_t remaining_budget() const {
        return std::min(config.budget, state.pool_size - state.labels.labeled_count());
    }

    void label(SelectionManifest manifest) {
        oracle.reveal(manifest.selected);
        state.labels.commit(std::move(manifest));
    }

    void train_and_record(std::size_t cycle, bool warm) {
        const auto& rows = state.labels.labeled();
        const auto labels = oracle.labels_for(rows);
        TrainRequest req;
        req.features = &pool;
        req.rows = rows;
        req.labels = labels;
        req.class_count = oracle.class_count();
        req.cycle = cycle;
        req.warm = warm;
        model->train(req);

        CycleRecord rec;
        rec.cycle = cycle;
        rec.labeled_count = rows.size();
        rec.lambda = static_cast<double>(rows.size()) / static_cast<double>(state.pool_size);
        rec.accuracy = evaluator(*model);
        rec.train_accuracy = model->train_accuracy();
        rec.degenerate = model->degenerate();
        state.cycles.push_back(rec);
        state.accuracy_trace.push_back(rec.accuracy);
    }

    bool warm() const { return config.train_mode == TrainMode::Warm; }

    void finish() { state.oracle_queries = oracle.revealed_count(); }
};

std::vector<double> scores_of(const SortedPool& sp, std::span<const std::size_t> rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(sp.scores[r]);
    return out;
}

}  // namespace

void RunConfig::validate(std::size_t n) const {
    if (cycles < 2) throw InvalidArgument("a run needs at least two cycles");
    if (budget < 1) throw InvalidArgument("per-cycle budget must be >= 1");
    if (budget * cycles > n) {
        throw InvalidArgument("budget K*I = " + std::to_string(budget * cycles) + " exceeds pool size " +
                              std::to_string(n));
    }
    if (!(eval_split > 0.0 && eval_split < 1.0)) throw InvalidArgument("eval_split must lie in (0, 1)");
    if (clusters && *clusters == 0) throw InvalidArgument("cluster count must be >= 1");
    if (beta && !beta_feasible(*beta, budget, cycles, n)) {
        throw InvalidArgument("beta " + std::to_string(*beta) + " below feasibility floor K*I/N");
    }
    for (double b : beta_candidates) {
        if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("beta candidates must be positive");
    }
    model.validate();
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(purpose >> 32)};
    std::uint32_t out[2];
    seq.generate(std::begin(out), std::end(out));
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

RunState run_with_order(const RunConfig& config, const FeatureMatrix& features, const SortedPool& sorted,
                        const FeatureMatrix* eval) {
    Loop loop(config, features, eval);
    const std::size_t n = features.n_rows;
    if (sorted.size() != n) throw InvalidArgument("sorted pool does not match the feature matrix");

    // Cycle 1: head of the sorted pool.
    {
        const Selection head = select_first_cycle(sorted, config.budget);
        SelectionManifest m;
        m.cycle = 1;
        m.beta = config.beta.value_or(1.0);
        m.subpool_start = 0;
        m.subpool_end = config.budget;
        m.selected = head.indices;
        m.scores = head.scores;
        loop.label(std::move(m));
        loop.train_and_record(1, false);
    }

    std::size_t next_cycle = 2;
    double beta = config.beta.value_or(1.0);
    if (!config.beta) {
        const std::vector<double> candidates =
            config.beta_candidates.empty() ? default_candidates(config.budget, config.cycles, n)
                                           : config.beta_candidates;
        if (candidates.empty()) throw InvalidArgument("no feasible balancing-factor candidate");
        BetaSearchContext ctx;
        ctx.sorted = &sorted;
        ctx.labels = &loop.state.labels;
        ctx.budget = loop.remaining_budget();
        ctx.cycles = config.cycles;
        ctx.features = &loop.pool;
        ctx.sampler = config.sampler;
        ctx.cycle1_model = loop.model.get();
        ctx.seed = derive_seed(config.seed, kSeedSampler + 2);
        TrialTraining training;
        training.prototype = loop.model.get();
        training.oracle = &loop.oracle;
        training.eval_split = config.eval_split;
        training.seed = derive_seed(config.seed, kSeedValidation);
        BetaSearchReport report = choose_beta(ctx, candidates, trial_fitness(ctx, training));
        beta = report.chosen;

        const CandidateTrial& win = report.trials[report.chosen_index];
        SelectionManifest m;
        m.cycle = 2;
        m.beta = beta;
        m.subpool_start = win.pool.window.start;
        m.subpool_end = win.pool.window.end;
        m.selected = win.rows();
        m.scores = win.selection.scores;
        const auto extra = scores_of(sorted, win.topped_up);
        m.scores.insert(m.scores.end(), extra.begin(), extra.end());
        loop.label(std::move(m));

        if (config.commit_all_candidates) {
            for (const auto& trial : report.trials) {
                for (std::size_t r : trial.rows()) {
                    if (!loop.state.labels.is_labeled(r)) {
                        const std::size_t one[] = {r};
                        loop.state.labels.mark(one);
                        loop.state.search_labels.push_back(r);
                    }
                }
            }
        }
        loop.state.beta_report = std::move(report);
        loop.train_and_record(2, loop.warm());
        next_cycle = 3;
    }
    loop.state.beta = beta;
    loop.state.labels.set_manifest_beta(0, beta);

    for (std::size_t cycle = next_cycle; cycle <= config.cycles; ++cycle) {
        const std::size_t k = loop.remaining_budget();
        if (k == 0) break;
        const SubPool sub = make_subpool(sorted, cycle, config.cycles, beta, loop.state.labels, k);
        Matrix probs;
        SamplerInputs in;
        in.members = sub.members;
        in.features = &loop.pool;
        in.seed = derive_seed(config.seed, kSeedSampler + cycle);
        if (needs_posteriors(config.sampler)) {
            probs = loop.model->predict_proba(loop.pool, sub.members);
            in.probs = &probs;
        }
        const Selection sel = sample(config.sampler, in, k);

        SelectionManifest m;
        m.cycle = cycle;
        m.beta = beta;
        m.subpool_start = sub.window.start;
        m.subpool_end = sub.window.end;
        m.selected = sel.indices;
        m.scores = sel.scores;
        if (sel.shortfall > 0) {
            const auto extra = top_up(sorted, sub.window, loop.state.labels, sel.indices, sel.shortfall);
            const auto extra_scores = scores_of(sorted, extra);
            m.selected.insert(m.selected.end(), extra.begin(), extra.end());
            m.scores.insert(m.scores.end(), extra_scores.begin(), extra_scores.end());
        }
        loop.label(std::move(m));
        loop.train_and_record(cycle, loop.warm());
    }
    loop.finish();
    return std::move(loop.state);
}

RunState run_bal(const RunConfig& config, const FeatureMatrix& features, const FeatureMatrix* eval) {
    config.validate(features.n_rows);
    const FeatureMatrix unlabeled = features.without_labels();
    const std::size_t k = config.clusters.value_or(features.class_count);
    if (k == 0) throw InvalidArgument("cluster count unknown: set clusters or supply class_count");
    const Clustering clustering = kmeans_fit(
        unlabeled,
        {.k = k, .seed = derive_seed(config.seed, kSeedKMeans), .max_iter = config.kmeans_max_iter,
         .tol = config.kmeans_tol});
    const SortedPool sorted = sort_pool(unlabeled, clustering, config.metric, config.direction);
    return run_with_order(config, features, sorted, eval);
}

RunState run_baseline_random(const RunConfig& config, const FeatureMatrix& features, const FeatureMatrix* eval) {
    Loop loop(config, features, eval);
    const std::size_t n = features.n_rows;
    for (std::size_t cycle = 1; cycle <= config.cycles; ++cycle) {
        const std::size_t k = loop.remaining_budget();
        if (k == 0) break;
        std::vector<std::size_t> unlabeled;
        unlabeled.reserve(n);
        for (std::size_t r = 0; r < n; ++r) {
            if (!loop.state.labels.is_labeled(r)) unlabeled.push_back(r);
        }
        const Selection sel = select_random(unlabeled, k, derive_seed(config.seed, kSeedBaseline + 1000 * cycle));
        SelectionManifest m;
        m.cycle = cycle;
        m.beta = 1.0;
        m.subpool_start = 0;
        m.subpool_end = n;
        m.selected = sel.indices;
        m.scores = sel.scores;
        loop.label(std::move(m));
        loop.train_and_record(cycle, cycle > 1 && loop.warm());
    }
    loop.finish();
    return std::move(loop.state);
}

}  // namespace bal
