#include "bal/rundir.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace bal {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

template <typename T>
T get_as(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["cycles"] = c.cycles;
    j["budget"] = c.budget;
    j["clusters"] = c.clusters ? json(*c.clusters) : json(nullptr);
    j["metric"] = to_string(c.metric);
    j["direction"] = to_string(c.direction);
    j["sampler"] = to_string(c.sampler);
    j["beta"] = c.beta ? json(*c.beta) : json("auto");
    j["beta_candidates"] = c.beta_candidates;
    ordered_json model;
    model["kind"] = to_string(c.model.kind);
    model["learning_rate"] = c.model.learning_rate;
    model["epochs"] = c.model.epochs;
    model["l2"] = c.model.l2;
    model["seed"] = c.model.seed;
    model["posteriors_template"] = c.model.posteriors_template;
    model["accuracy_template"] = c.model.accuracy_template;
    j["model"] = model;
    j["train_mode"] = to_string(c.train_mode);
    j["seed"] = c.seed;
    j["eval_split"] = c.eval_split;
    j["commit_all_candidates"] = c.commit_all_candidates;
    j["kmeans_max_iter"] = c.kmeans_max_iter;
    j["kmeans_tol"] = c.kmeans_tol;
    return j;
}

void apply_config_json(RunConfig& c, const json& j) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    static const std::set<std::string> known = {
        "cycles", "budget", "clusters", "metric", "direction", "sampler", "beta", "beta_candidates", "model",
        "train_mode", "seed", "eval_split", "commit_all_candidates", "kmeans_max_iter", "kmeans_tol"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw InvalidArgument("unknown config key '" + key + "'");
    }
    if (j.contains("cycles")) c.cycles = get_as<std::size_t>(j, "cycles");
    if (j.contains("budget")) c.budget = get_as<std::size_t>(j, "budget");
    if (j.contains("clusters")) {
        if (j["clusters"].is_null()) {
            c.clusters.reset();
        } else {
            c.clusters = get_as<std::size_t>(j, "clusters");
        }
    }
    if (j.contains("metric")) c.metric = parse_metric(get_as<std::string>(j, "metric"));
    if (j.contains("direction")) c.direction = parse_direction(get_as<std::string>(j, "direction"));
    if (j.contains("sampler")) c.sampler = parse_sampler(get_as<std::string>(j, "sampler"));
    if (j.contains("beta")) {
        const auto& b = j["beta"];
        if (b.is_string() && b.get<std::string>() == "auto") {
            c.beta.reset();
        } else if (b.is_number()) {
            c.beta = b.get<double>();
        } else {
            throw InvalidArgument("config key 'beta' must be a number or \"auto\"");
        }
    }
    if (j.contains("beta_candidates")) c.beta_candidates = get_as<std::vector<double>>(j, "beta_candidates");
    if (j.contains("model")) {
        const auto& m = j["model"];
        if (!m.is_object()) throw InvalidArgument("config key 'model' must be an object");
        static const std::set<std::string> model_keys = {
            "kind", "learning_rate", "epochs", "l2", "seed", "posteriors_template", "accuracy_template"};
        for (const auto& [key, value] : m.items()) {
            if (!model_keys.count(key)) throw InvalidArgument("unknown model key '" + key + "'");
        }
        if (m.contains("kind")) c.model.kind = parse_model_kind(get_as<std::string>(m, "kind"));
        if (m.contains("learning_rate")) c.model.learning_rate = get_as<double>(m, "learning_rate");
        if (m.contains("epochs")) c.model.epochs = get_as<std::size_t>(m, "epochs");
        if (m.contains("l2")) c.model.l2 = get_as<double>(m, "l2");
        if (m.contains("seed")) c.model.seed = get_as<std::uint64_t>(m, "seed");
        if (m.contains("posteriors_template")) {
            c.model.posteriors_template = get_as<std::string>(m, "posteriors_template");
        }
        if (m.contains("accuracy_template")) c.model.accuracy_template = get_as<std::string>(m, "accuracy_template");
    }
    if (j.contains("train_mode")) c.train_mode = parse_train_mode(get_as<std::string>(j, "train_mode"));
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed");
    if (j.contains("eval_split")) c.eval_split = get_as<double>(j, "eval_split");
    if (j.contains("commit_all_candidates")) c.commit_all_candidates = get_as<bool>(j, "commit_all_candidates");
    if (j.contains("kmeans_max_iter")) c.kmeans_max_iter = get_as<std::size_t>(j, "kmeans_max_iter");
    if (j.contains("kmeans_tol")) c.kmeans_tol = get_as<double>(j, "kmeans_tol");
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    apply_config_json(c, j);
    return c;
}

ordered_json clustering_to_json(const Clustering& c) {
    ordered_json j;
    json centroids = json::array();
    for (std::size_t r = 0; r < c.centroids.rows(); ++r) {
        const auto row = c.centroids.row(r);
        centroids.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["centroids"] = centroids;
    j["assignments"] = c.assignments;
    j["inertia"] = c.inertia;
    j["iterations"] = c.iterations;
    return j;
}

Clustering clustering_from_json(const json& j) {
    try {
        Clustering c;
        const auto rows = j.at("centroids").get<std::vector<std::vector<double>>>();
        const std::size_t dim = rows.empty() ? 0 : rows.front().size();
        c.centroids = Matrix(rows.size(), dim);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != dim) throw InvalidArgument("ragged centroid rows");
            std::copy(rows[r].begin(), rows[r].end(), c.centroids.row(r).begin());
        }
        if (j.contains("assignments")) c.assignments = j["assignments"].get<std::vector<std::uint32_t>>();
        if (j.contains("inertia")) c.inertia = j["inertia"].get<double>();
        if (j.contains("iterations")) c.iterations = j["iterations"].get<std::size_t>();
        return c;
    } catch (const json::exception& e) {
        throw FormatError(FormatErrorKind::NonNumeric, std::string("clustering JSON: ") + e.what());
    }
}

ordered_json beta_report_to_json(const BetaSearchReport& r, bool searched) {
    ordered_json j;
    j["searched"] = searched;
    j["candidates"] = r.candidates;
    j["accuracies"] = r.accuracies;
    j["chosen"] = r.chosen;
    j["infeasible"] = r.infeasible;
    json windows = json::array();
    for (const auto& t : r.trials) {
        windows.push_back({{"beta", t.beta}, {"subpool_start", t.pool.window.start},
                           {"subpool_end", t.pool.window.end}, {"members", t.pool.members.size()}});
    }
    j["trials"] = windows;
    return j;
}

std::string format_trace_csv(const std::vector<CycleRecord>& cycles) {
    std::string out = "cycle,labeled_count,lambda,accuracy\n";
    char buf[128];
    for (const auto& c : cycles) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f\n", c.cycle, c.labeled_count, c.lambda, c.accuracy);
        out += buf;
    }
    return out;
}

std::vector<CycleRecord> parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("cycle,labeled_count,lambda,accuracy", 0) != 0) {
        throw FormatError(FormatErrorKind::BadMagic, "trace.csv must start with cycle,labeled_count,lambda,accuracy");
    }
    std::vector<CycleRecord> out;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        CycleRecord c;
        if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf", &c.cycle, &c.labeled_count, &c.lambda, &c.accuracy) != 4) {
            throw FormatError(FormatErrorKind::NonNumeric, "trace.csv line '" + line + "'");
        }
        out.push_back(c);
    }
    return out;
}

void write_run_dir(const std::filesystem::path& dir, const RunConfig& config, const RunState& state) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw FormatError(FormatErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    write_text_file(dir / "config.json", config_to_json(config).dump(2) + "\n");

    BetaSearchReport fixed;
    fixed.candidates = {state.beta};
    fixed.chosen = state.beta;
    const bool searched = state.beta_report.has_value();
    write_text_file(dir / "beta_report.json",
                    beta_report_to_json(searched ? *state.beta_report : fixed, searched).dump(2) + "\n");

    write_manifest(state.labels.per_cycle(), dir / "manifests.jsonl");
    write_text_file(dir / "trace.csv", format_trace_csv(state.cycles));
}

RunState read_run_dir(const std::filesystem::path& dir, std::size_t pool_size) {
    RunState state;
    state.pool_size = pool_size;
    const auto manifests = read_manifest(dir / "manifests.jsonl");
    state.labels = LabelState::replay(pool_size, manifests);
    state.cycles = parse_trace_csv(read_text_file(dir / "trace.csv"));
    for (const auto& c : state.cycles) state.accuracy_trace.push_back(c.accuracy);
    if (std::filesystem::exists(dir / "beta_report.json")) {
        try {
            const auto j = json::parse(read_text_file(dir / "beta_report.json"));
            state.beta = j.at("chosen").get<double>();
        } catch (const json::exception& e) {
            throw FormatError(FormatErrorKind::NonNumeric, std::string("beta_report.json: ") + e.what());
        }
    }
    return state;
}

}  // namespace bal
