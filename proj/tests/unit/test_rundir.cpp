#include <doctest.h>

#include "bal/harness.hpp"
#include "bal/rundir.hpp"
#include "test_util.hpp"

using namespace bal;
using bal::test::temp_dir;

TEST_SUITE("rundir") {

TEST_CASE("config json round trip") {
    RunConfig c;
    c.cycles = 6;
    c.budget = 20;
    c.clusters = 7;
    c.metric = Metric::NearestDistance;
    c.direction = Direction::Descending;
    c.sampler = SamplerKind::Entropy;
    c.beta = 1.3;
    c.beta_candidates = {1.0, 2.0};
    c.model.epochs = 50;
    c.train_mode = TrainMode::Cold;
    c.seed = 99;
    c.commit_all_candidates = true;
    const RunConfig back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
    CHECK(config_to_json(back) == config_to_json(c));

    RunConfig autob;
    CHECK(config_to_json(autob)["beta"] == "auto");
    CHECK_FALSE(config_from_json(config_to_json(autob)).beta.has_value());
}

TEST_CASE("config json rejects unknown keys and bad values") {
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"cycles": 3, "speed": 2})")), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"model": {"depth": 3}})")), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"beta": "wide"})")), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"sampler": "margin"})")), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"cycles": "three"})")), InvalidArgument);
    const RunConfig partial = config_from_json(nlohmann::json::parse(R"({"budget": 5})"));
    CHECK(partial.budget == 5);
    CHECK(partial.cycles == RunConfig{}.cycles);
}

TEST_CASE("trace csv round trip") {
    std::vector<CycleRecord> cycles = {{1, 50, 0.025, 0.5}, {2, 100, 0.05, 0.875}};
    const std::string csv = format_trace_csv(cycles);
    CHECK(csv == "cycle,labeled_count,lambda,accuracy\n1,50,0.025000,0.500000\n2,100,0.050000,0.875000\n");
    const auto back = parse_trace_csv(csv);
    REQUIRE(back.size() == 2);
    CHECK(back[1].labeled_count == 100);
    CHECK(back[1].accuracy == 0.875);
    CHECK_THROWS_AS(parse_trace_csv("nope\n"), FormatError);
}

TEST_CASE("clustering json round trip") {
    const FeatureMatrix m = bal::test::random_matrix(20, 3, 1);
    const Clustering c = kmeans_fit(m, {.k = 3, .seed = 1});
    const Clustering back = clustering_from_json(nlohmann::json::parse(clustering_to_json(c).dump()));
    CHECK(back.centroids == c.centroids);
    CHECK(back.assignments == c.assignments);
    CHECK(back.inertia == c.inertia);
    CHECK(back.iterations == c.iterations);
}

TEST_CASE("run directory layout") {
    const FeatureMatrix f = synth_generate({.classes = 3, .per_class = 30, .dim = 4, .seed = 2});
    RunConfig c;
    c.cycles = 3;
    c.budget = 10;
    c.model.epochs = 30;
    const RunState s = run_bal(c, f);
    const auto dir = temp_dir("rundir");
    write_run_dir(dir / "run", c, s);
    for (const char* name : {"config.json", "beta_report.json", "manifests.jsonl", "trace.csv"}) {
        CHECK(std::filesystem::exists(dir / "run" / name));
    }
    const auto cfg = nlohmann::json::parse(read_text_file(dir / "run" / "config.json"));
    CHECK(config_to_json(config_from_json(cfg)) == config_to_json(c));
    const auto report = nlohmann::json::parse(read_text_file(dir / "run" / "beta_report.json"));
    CHECK(report["searched"] == true);
    CHECK(report["chosen"] == s.beta);

    const RunState back = read_run_dir(dir / "run", f.n_rows);
    CHECK(back.labels.per_cycle() == s.labels.per_cycle());
    CHECK(back.labels.labeled() == s.labels.labeled());
    CHECK(back.cycles.size() == 3);
    CHECK(back.beta == s.beta);
    CHECK(subpool_class_balance(back, f) == subpool_class_balance(s, f));
}

}
