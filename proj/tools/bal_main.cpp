// bal: command-line front end over the selection engine.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bal/cdd.hpp"
#include "bal/clustering.hpp"
#include "bal/featio.hpp"
#include "bal/harness.hpp"
#include "bal/orchestrator.hpp"
#include "bal/pool.hpp"
#include "bal/rundir.hpp"
#include "bal/samplers.hpp"

namespace {

using namespace bal;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

FeatureMatrix load_features(const fs::path& path, bool label_column) {
    if (path.extension() == ".csv") return read_csv(path, label_column);
    return read_fmat(path);
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_text_file(out, text);
    }
}

Clustering load_clustering(const fs::path& path) {
    try {
        return clustering_from_json(nlohmann::json::parse(read_text_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(FormatErrorKind::NonNumeric, path.string() + ": " + e.what());
    }
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("BAL_SEED");
    if (!s || !*s) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0') throw UsageError(std::string("BAL_SEED is not an integer: ") + s);
    return v;
}

// Options shared by `run` and `baseline`.
struct RunArgs {
    std::string config;
    std::string features;
    std::string eval;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> cycles;
    std::optional<std::size_t> budget;
    std::optional<std::size_t> clusters;
    std::string beta;
    std::string sampler;
    std::string metric;
    std::string direction;
    std::string train_mode;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
    cmd->add_option("--config", a.config, "RunConfig JSON")->check(CLI::ExistingFile);
    cmd->add_option("--features", a.features, "labeled pool (FMAT or CSV)")->required();
    cmd->add_option("--eval", a.eval, "held-out labeled matrix for the accuracy trace");
    cmd->add_option("--out", a.out, "run directory")->required();
    cmd->add_option("--seed", a.seed, "overrides config and BAL_SEED");
    cmd->add_option("--cycles", a.cycles);
    cmd->add_option("--budget", a.budget);
    cmd->add_option("--clusters", a.clusters);
    cmd->add_option("--beta", a.beta, "number or auto");
    cmd->add_option("--sampler", a.sampler);
    cmd->add_option("--metric", a.metric);
    cmd->add_option("--direction", a.direction);
    cmd->add_option("--train-mode", a.train_mode);
}

RunConfig effective_config(const RunArgs& a) {
    RunConfig c;
    if (!a.config.empty()) {
        try {
            apply_config_json(c, nlohmann::json::parse(read_text_file(a.config)));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(FormatErrorKind::NonNumeric, a.config + ": " + e.what());
        }
    }
    if (auto s = env_seed()) c.seed = *s;
    if (a.seed) c.seed = *a.seed;
    if (a.cycles) c.cycles = *a.cycles;
    if (a.budget) c.budget = *a.budget;
    if (a.clusters) c.clusters = *a.clusters;
    if (!a.beta.empty()) {
        if (a.beta == "auto") {
            c.beta.reset();
        } else {
            try {
                c.beta = std::stod(a.beta);
            } catch (const std::exception&) {
                throw UsageError("--beta must be a number or auto");
            }
        }
    }
    if (!a.sampler.empty()) c.sampler = parse_sampler(a.sampler);
    if (!a.metric.empty()) c.metric = parse_metric(a.metric);
    if (!a.direction.empty()) c.direction = parse_direction(a.direction);
    if (!a.train_mode.empty()) c.train_mode = parse_train_mode(a.train_mode);
    return c;
}

void print_run_summary(const RunState& state, const fs::path& out) {
    const double final_acc = state.accuracy_trace.empty() ? 0.0 : state.accuracy_trace.back();
    std::printf("beta %.4g\nlabeled %zu of %zu\nfinal accuracy %.6f\nrun dir %s\n", state.beta,
                state.labels.labeled_count(), state.pool_size, final_acc, out.string().c_str());
}

int run_main(int argc, char** argv) {
    CLI::App app{"bal: clustered, sub-pooled active-learning sample selection"};
    app.require_subcommand(1);

    // synth
    MixtureSpec mix;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "generate a labeled Gaussian-mixture pool");
    synth->add_option("--out", synth_out, "output FMAT")->required();
    synth->add_option("--classes", mix.classes);
    synth->add_option("--per-class", mix.per_class);
    synth->add_option("--dim", mix.dim);
    synth->add_option("--spread", mix.spread);
    synth->add_option("--separation", mix.separation);
    synth->add_option("--seed", mix.seed);

    // cluster
    std::string cl_features, cl_out;
    KMeansOptions km;
    bool cl_label_column = false;
    auto* cluster = app.add_subcommand("cluster", "fit k-means and emit JSON");
    cluster->add_option("--features", cl_features)->required();
    cluster->add_option("--k", km.k)->required();
    cluster->add_option("--seed", km.seed);
    cluster->add_option("--max-iter", km.max_iter);
    cluster->add_option("--tol", km.tol);
    cluster->add_option("--out", cl_out, "default stdout");
    cluster->add_flag("--label-column", cl_label_column, "CSV input carries a trailing label column");

    // cdd
    std::string cd_features, cd_clusters, cd_out, cd_metric = "cdd", cd_direction = "ascending";
    std::size_t cd_k = 0;
    std::uint64_t cd_seed = 0;
    bool cd_label_column = false;
    auto* cdd = app.add_subcommand("cdd", "score and sort the pool, emit row_index,score,rank CSV");
    cdd->add_option("--features", cd_features)->required();
    cdd->add_option("--clusters", cd_clusters, "clustering JSON from `cluster`");
    cdd->add_option("--k", cd_k, "fit k-means here instead of reading --clusters");
    cdd->add_option("--seed", cd_seed);
    cdd->add_option("--metric", cd_metric);
    cdd->add_option("--direction", cd_direction);
    cdd->add_option("--out", cd_out, "default stdout");
    cdd->add_flag("--label-column", cd_label_column);

    // subpool
    std::size_t sp_n = 0, sp_cycles = 0, sp_cycle = 0, sp_budget = 0;
    double sp_beta = 1.0;
    std::string sp_scores, sp_labeled;
    auto* subpool = app.add_subcommand("subpool", "print the window and member count of one cycle");
    subpool->add_option("--n", sp_n, "pool size (or taken from --scores)");
    subpool->add_option("--cycles", sp_cycles)->required();
    subpool->add_option("--beta", sp_beta)->required();
    subpool->add_option("--cycle", sp_cycle)->required();
    subpool->add_option("--scores", sp_scores, "score CSV from `cdd`");
    subpool->add_option("--labeled", sp_labeled, "manifests.jsonl of rows already labeled");
    subpool->add_option("--budget", sp_budget, "widen the window until this many members remain");

    // select
    std::string se_scores, se_labeled, se_probs, se_features, se_sampler = "confidence", se_out;
    std::string se_metric = "cdd", se_direction = "ascending";
    std::size_t se_cycles = 0, se_cycle = 0, se_budget = 0;
    double se_beta = 1.0;
    std::uint64_t se_seed = 0;
    auto* select = app.add_subcommand("select", "one sub-pool and sampler step; emits a manifest line");
    select->add_option("--scores", se_scores, "score CSV from `cdd`")->required();
    select->add_option("--metric", se_metric);
    select->add_option("--direction", se_direction);
    select->add_option("--cycles", se_cycles)->required();
    select->add_option("--cycle", se_cycle)->required();
    select->add_option("--beta", se_beta);
    select->add_option("--budget", se_budget)->required();
    select->add_option("--sampler", se_sampler);
    select->add_option("--labeled", se_labeled, "manifests.jsonl of rows already labeled");
    select->add_option("--probs", se_probs, "N x C posterior FMAT indexed by pool row");
    select->add_option("--features", se_features, "pool features for the cluster sampler");
    select->add_option("--seed", se_seed);
    select->add_option("--out", se_out, "default stdout");

    RunArgs run_args, base_args;
    auto* run = app.add_subcommand("run", "full selection loop");
    add_run_options(run, run_args);
    auto* baseline = app.add_subcommand("baseline", "random-selection loop");
    add_run_options(baseline, base_args);

    // balance
    std::string ba_run, ba_features;
    auto* balance = app.add_subcommand("balance", "per-cycle class balance of a run directory");
    balance->add_option("--run", ba_run)->required();
    balance->add_option("--features", ba_features, "the labeled pool the run used")->required();

    // compare
    std::string co_a, co_b, co_out;
    auto* compare = app.add_subcommand("compare", "per-cycle accuracy deltas of two run directories");
    compare->add_option("a", co_a)->required();
    compare->add_option("b", co_b)->required();
    compare->add_option("--out", co_out, "default stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (*synth) {
        write_fmat(synth_generate(mix), synth_out);
        std::printf("wrote %zu x %zu to %s\n", mix.classes * mix.per_class, mix.dim, synth_out.c_str());
    } else if (*cluster) {
        const FeatureMatrix m = load_features(cl_features, cl_label_column).without_labels();
        emit(clustering_to_json(kmeans_fit(m, km)).dump(2) + "\n", cl_out);
    } else if (*cdd) {
        if (cd_clusters.empty() == (cd_k == 0)) throw UsageError("cdd needs exactly one of --clusters or --k");
        const FeatureMatrix m = load_features(cd_features, cd_label_column).without_labels();
        const Clustering c = cd_clusters.empty() ? kmeans_fit(m, {.k = cd_k, .seed = cd_seed})
                                                 : load_clustering(cd_clusters);
        emit(format_score_csv(sort_pool(m, c, parse_metric(cd_metric), parse_direction(cd_direction))), cd_out);
    } else if (*subpool) {
        SortedPool sp;
        if (sp_scores.empty()) {
            if (sp_n == 0) throw UsageError("subpool needs --n or --scores");
            sp.order.resize(sp_n);
            std::iota(sp.order.begin(), sp.order.end(), std::size_t{0});
            sp.scores.assign(sp_n, 0.0);
        } else {
            sp = parse_score_csv(read_text_file(sp_scores), Metric::Cdd, Direction::Ascending);
        }
        const std::size_t n = sp.size();
        LabelState labels(n);
        if (!sp_labeled.empty()) labels = LabelState::replay(n, read_manifest(sp_labeled));
        Window w;
        std::size_t members = 0;
        if (sp_budget == 0) {
            w = subpool_window(n, sp_cycles, sp_beta, sp_cycle);
            for (std::size_t p = w.start; p < w.end; ++p) members += labels.is_labeled(sp.order[p]) ? 0 : 1;
        } else {
            const SubPool pool = make_subpool(sp, sp_cycle, sp_cycles, sp_beta, labels, sp_budget);
            w = pool.window;
            members = pool.members.size();
        }
        std::printf("window [%zu,%zu)\nmembers %zu\n", w.start, w.end, members);
    } else if (*select) {
        const SortedPool sp =
            parse_score_csv(read_text_file(se_scores), parse_metric(se_metric), parse_direction(se_direction));
        const std::size_t n = sp.size();
        LabelState labels(n);
        if (!se_labeled.empty()) labels = LabelState::replay(n, read_manifest(se_labeled));
        const SamplerKind kind = parse_sampler(se_sampler);

        SelectionManifest m;
        m.cycle = se_cycle;
        m.beta = se_beta;
        if (se_cycle == 1) {
            const Selection s = select_first_cycle(sp, se_budget);
            m.subpool_start = 0;
            m.subpool_end = se_budget;
            m.selected = s.indices;
            m.scores = s.scores;
        } else {
            const SubPool pool = make_subpool(sp, se_cycle, se_cycles, se_beta, labels, se_budget);
            FeatureMatrix features;
            Matrix probs;
            SamplerInputs in;
            in.members = pool.members;
            in.seed = se_seed;
            if (needs_posteriors(kind)) {
                if (se_probs.empty()) throw UsageError(std::string(to_string(kind)) + " sampler needs --probs");
                const FeatureMatrix all = read_fmat(se_probs);
                if (all.n_rows != n) throw InvalidArgument("--probs must have one row per pool row");
                probs = Matrix(pool.members.size(), all.n_cols);
                for (std::size_t r = 0; r < pool.members.size(); ++r) {
                    const auto src = all.row(pool.members[r]);
                    std::copy(src.begin(), src.end(), probs.row(r).begin());
                }
                in.probs = &probs;
            }
            if (kind == SamplerKind::Cluster) {
                if (se_features.empty()) throw UsageError("cluster sampler needs --features");
                features = load_features(se_features, false).without_labels();
                if (features.n_rows != n) throw InvalidArgument("--features must have one row per pool row");
                in.features = &features;
            }
            const Selection s = sample(kind, in, se_budget);
            m.subpool_start = pool.window.start;
            m.subpool_end = pool.window.end;
            m.selected = s.indices;
            m.scores = s.scores;
            if (s.shortfall > 0) {
                for (std::size_t r : top_up(sp, pool.window, labels, s.indices, s.shortfall)) {
                    m.selected.push_back(r);
                    m.scores.push_back(sp.scores[r]);
                }
            }
        }
        emit(format_manifest_line(m) + "\n", se_out);
    } else if (*run || *baseline) {
        const RunArgs& a = *run ? run_args : base_args;
        const RunConfig config = effective_config(a);
        const FeatureMatrix features = load_features(a.features, true);
        std::optional<FeatureMatrix> eval;
        if (!a.eval.empty()) eval = load_features(a.eval, true);
        const FeatureMatrix* ev = eval ? &*eval : nullptr;
        const RunState state = *run ? run_bal(config, features, ev) : run_baseline_random(config, features, ev);
        write_run_dir(a.out, config, state);
        print_run_summary(state, a.out);
    } else if (*balance) {
        const FeatureMatrix features = load_features(ba_features, true);
        const RunState state = read_run_dir(ba_run, features.n_rows);
        const auto per_cycle = subpool_class_balance(state, features);
        std::printf("cycle,balance\n");
        double sum = 0.0;
        for (std::size_t i = 0; i < per_cycle.size(); ++i) {
            std::printf("%zu,%.6f\n", state.labels.per_cycle()[i].cycle, per_cycle[i]);
            sum += per_cycle[i];
        }
        std::printf("mean,%.6f\n", per_cycle.empty() ? 0.0 : sum / static_cast<double>(per_cycle.size()));
    } else if (*compare) {
        const auto a = parse_trace_csv(read_text_file(fs::path(co_a) / "trace.csv"));
        const auto b = parse_trace_csv(read_text_file(fs::path(co_b) / "trace.csv"));
        emit(compare_traces(a, b).to_csv(), co_out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "bal: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bal: %s\n", e.what());
        return 2;
    }
}
