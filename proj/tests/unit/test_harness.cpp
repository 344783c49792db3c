#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "bal/harness.hpp"
#include "test_util.hpp"

using namespace bal;

namespace {

RunState with_manifests(std::vector<std::vector<std::size_t>> cycles) {
    RunState s;
    std::size_t n = 0;
    for (const auto& c : cycles) n += c.size();
    s.labels = LabelState(1000);
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        s.labels.commit({i + 1, 1.0, 0, 0, cycles[i], std::vector<double>(cycles[i].size(), 0.0)});
    }
    return s;
}

std::vector<CycleRecord> trace(std::vector<double> acc) {
    std::vector<CycleRecord> out;
    for (std::size_t i = 0; i < acc.size(); ++i) out.push_back({i + 1, (i + 1) * 10, 0.1 * (i + 1), acc[i]});
    return out;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("zero spread puts every point on its center") {
    const MixtureSpec spec{.classes = 3, .per_class = 5, .dim = 4, .spread = 0.0, .seed = 2};
    const FeatureMatrix m = synth_generate(spec);
    const Matrix centers = synth_centers(spec);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        for (std::size_t d = 0; d < 4; ++d) {
            CHECK(m.row(i)[d] == static_cast<float>(centers((*m.labels)[i], d)));
        }
    }
}

TEST_CASE("generation is deterministic and class histogram is uniform") {
    const MixtureSpec spec{.classes = 7, .per_class = 13, .dim = 3, .seed = 5};
    const FeatureMatrix a = synth_generate(spec);
    CHECK(a == synth_generate(spec));
    std::vector<std::size_t> hist(7, 0);
    for (auto l : *a.labels) ++hist[l];
    for (auto h : hist) CHECK(h == 13);
    CHECK(a.class_count == 7);
    CHECK_FALSE(a == synth_generate({.classes = 7, .per_class = 13, .dim = 3, .seed = 6}));
}

TEST_CASE("well separated mixture is recovered by k-means") {
    const MixtureSpec spec{.classes = 2, .per_class = 100, .spread = 0.1, .separation = 100.0, .seed = 3};
    const FeatureMatrix m = synth_generate(spec);
    const Matrix centers = synth_centers(spec);
    const Clustering c = kmeans_fit(m.without_labels(), {.k = 2, .seed = 0});
    for (std::size_t t = 0; t < 2; ++t) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < 2; ++j) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < spec.dim; ++d) {
                d2 += (c.centroids(j, d) - centers(t, d)) * (c.centroids(j, d) - centers(t, d));
            }
            best = std::min(best, std::sqrt(d2));
        }
        CHECK(best < 0.5);
    }
}

TEST_CASE("invalid mixture specs") {
    CHECK_THROWS_AS(synth_generate({.classes = 1}), InvalidArgument);
    CHECK_THROWS_AS(synth_generate({.per_class = 0}), InvalidArgument);
    CHECK_THROWS_AS(synth_generate({.dim = 1}), InvalidArgument);
}

TEST_CASE("class balance examples") {
    FeatureMatrix f = bal::test::random_matrix(8, 2, 0);
    f.labels = std::vector<std::uint32_t>{0, 1, 2, 3, 0, 0, 0, 0};
    f.class_count = 4;
    const RunState even = with_manifests({{0, 1, 2, 3}});
    CHECK(subpool_class_balance(even, f)[0] == doctest::Approx(1.0));
    const RunState skewed = with_manifests({{4, 5, 6, 7}});
    CHECK(subpool_class_balance(skewed, f)[0] == 0.0);
    // Half and half over four classes: log 2 / log 4.
    const RunState half = with_manifests({{0, 1, 4, 5}});
    const double expected = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25)) / std::log(4.0);
    CHECK(subpool_class_balance(half, f)[0] == doctest::Approx(expected));
}

TEST_CASE("class balance is invariant under relabeling of class ids") {
    std::mt19937_64 rng(4);
    std::vector<std::size_t> hist(6);
    for (int trial = 0; trial < 20; ++trial) {
        for (auto& h : hist) h = rng() % 9;
        hist[0] += 1;
        auto shuffled = hist;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const double a = normalized_class_entropy(hist);
        CHECK(a == doctest::Approx(normalized_class_entropy(shuffled)));
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
    }
    CHECK_THROWS_AS(normalized_class_entropy({0, 0, 0}), InvalidArgument);
}

TEST_CASE("random order pool is a seeded permutation") {
    const SortedPool a = random_order_pool(50, 3);
    std::vector<std::size_t> sorted = a.order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> ids(50);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    CHECK(sorted == ids);
    CHECK(a.order == random_order_pool(50, 3).order);
    CHECK_FALSE(a.order == random_order_pool(50, 4).order);
}

TEST_CASE("comparison tables") {
    const auto same = compare_traces(trace({0.5, 0.6}), trace({0.5, 0.6}));
    for (const auto& r : same.rows) CHECK(r.delta == 0.0);

    const auto t = compare_traces(trace({0.5, 0.6}), trace({0.4, 0.7}));
    CHECK(t.rows[0].delta == doctest::Approx(0.1));
    CHECK(t.rows[1].delta == doctest::Approx(-0.1));
    CHECK(t.final_delta == doctest::Approx(-0.1));
    CHECK(t.to_csv().rfind("cycle,lambda,accuracy_a,accuracy_b,delta\n", 0) == 0);

    CHECK_THROWS_AS(compare_traces(trace({0.5}), trace({0.5, 0.6})), InvalidArgument);
    auto shifted = trace({0.5, 0.6});
    shifted[1].lambda = 0.3;
    CHECK_THROWS_AS(compare_traces(trace({0.5, 0.6}), shifted), InvalidArgument);
}

}
