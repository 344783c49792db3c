#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bal/pool.hpp"
#include "test_util.hpp"

using namespace bal;

namespace {

// Window membership by midpoint: position p is inside when a < p + 0.5 <= b,
// where [a, b] is the real-valued interval centered on the cycle's uniform
// segment. Equivalent to half-up rounding of both endpoints, with the same
// 1e-9 tolerance at exact ties.
std::set<std::size_t> window_oracle(std::size_t n, std::size_t cycles, double beta, std::size_t i) {
    const double seg = static_cast<double>(n) / static_cast<double>(cycles);
    std::set<std::size_t> out;
    double a = 0.0;
    double b = beta * seg;
    if (i == cycles) {
        a = static_cast<double>(n) - beta * seg;
        b = static_cast<double>(n);
    } else if (i > 1) {
        const double center = (static_cast<double>(i) - 0.5) * seg;
        a = center - beta * seg / 2.0;
        b = center + beta * seg / 2.0;
    }
    for (std::size_t p = 0; p < n; ++p) {
        const double mid = static_cast<double>(p) + 0.5;
        if (a + 1e-9 < mid && mid <= b + 1e-9) out.insert(p);
    }
    return out;
}

std::set<std::size_t> as_set(const Window& w) {
    std::set<std::size_t> out;
    for (std::size_t p = w.start; p < w.end; ++p) out.insert(p);
    return out;
}

SortedPool identity_pool(std::size_t n) {
    SortedPool sp;
    sp.order.resize(n);
    std::iota(sp.order.begin(), sp.order.end(), std::size_t{0});
    sp.scores.assign(n, 0.0);
    return sp;
}

}  // namespace

TEST_SUITE("pool") {

TEST_CASE("window examples") {
    CHECK(subpool_window(100, 10, 1.0, 4) == Window{30, 40});
    CHECK(subpool_window(100, 10, 1.3, 1) == Window{0, 13});
    CHECK(subpool_window(100, 10, 2.0, 5) == Window{35, 55});
    CHECK(subpool_window(100, 10, 1.0, 10) == Window{90, 100});
}

TEST_CASE("beta 2 interior window is centered on the beta 1 window") {
    const Window w2 = subpool_window(100, 10, 2.0, 5);
    const Window w1 = subpool_window(100, 10, 1.0, 5);
    CHECK(w1 == Window{40, 50});
    CHECK(w1.start - w2.start == 5);
    CHECK(w2.end - w1.end == 5);
    CHECK(as_set(w2) == window_oracle(100, 10, 2.0, 5));
}

TEST_CASE("windows match the midpoint oracle over a parameter grid") {
    for (std::size_t n : {37u, 100u, 250u, 1000u}) {
        for (std::size_t cycles : {2u, 3u, 5u, 7u, 10u}) {
            for (double beta : {0.3, 0.5, 0.75, 1.0, 1.3, 1.6, 2.0, 3.5}) {
                for (std::size_t i = 1; i <= cycles; ++i) {
                    INFO("n=" << n << " I=" << cycles << " beta=" << beta << " i=" << i);
                    CHECK(as_set(subpool_window(n, cycles, beta, i)) == window_oracle(n, cycles, beta, i));
                }
            }
        }
    }
}

TEST_CASE("coverage examples") {
    const CoverageReport uniform = subpool_coverage(10, 1.0, 100);
    CHECK(uniform.exact_tiling);
    CHECK(uniform.uncovered == 0);
    for (std::size_t o : uniform.overlaps) CHECK(o == 0);
    for (std::size_t g : uniform.gaps) CHECK(g == 0);

    // Interior pairs are windows 2..I-1, i.e. report indices 1..I-3.
    const CoverageReport wide = subpool_coverage(10, 2.0, 100);
    for (std::size_t i = 1; i + 2 < 10; ++i) {
        std::set<std::size_t> both;
        const auto a = as_set(wide.windows[i]);
        const auto b = as_set(wide.windows[i + 1]);
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(both, both.end()));
        CHECK(both.size() == 10);
        CHECK(wide.overlaps[i] == 10);
    }

    const CoverageReport narrow = subpool_coverage(10, 0.5, 100);
    for (std::size_t i = 1; i + 2 < 10; ++i) {
        CHECK(narrow.windows[i + 1].start - narrow.windows[i].end == 5);
        CHECK(narrow.gaps[i] == 5);
    }
    CHECK(narrow.uncovered > 0);
}

TEST_CASE("beta 1 windows are disjoint and leave fewer than I positions uncovered") {
    for (std::size_t n : {10u, 33u, 101u, 999u}) {
        for (std::size_t cycles : {2u, 3u, 7u, 10u}) {
            if (n < cycles) continue;
            const CoverageReport r = subpool_coverage(cycles, 1.0, n);
            std::vector<int> hits(n, 0);
            for (const auto& w : r.windows) {
                for (std::size_t p = w.start; p < w.end; ++p) ++hits[p];
            }
            CHECK(*std::max_element(hits.begin(), hits.end()) <= 1);
            CHECK(r.uncovered < cycles);
            if (n % cycles == 0) CHECK(r.exact_tiling);
        }
    }
}

TEST_CASE("window width is non-decreasing in beta") {
    for (std::size_t i = 1; i <= 8; ++i) {
        std::size_t prev = 0;
        for (double beta = 0.1; beta <= 4.0; beta += 0.05) {
            const std::size_t w = subpool_window(400, 8, beta, i).size();
            CHECK(w >= prev);
            prev = w;
        }
    }
}

TEST_CASE("window length is floor(beta N / I) within one position before clamping") {
    for (double beta : {0.5, 0.9, 1.0, 1.3, 1.7}) {
        for (std::size_t i = 1; i <= 6; ++i) {
            const double ideal = std::floor(beta * 500.0 / 6.0);
            const auto w = static_cast<double>(subpool_window(500, 6, beta, i).size());
            CHECK(std::abs(w - ideal) <= 1.0);
        }
    }
}

TEST_CASE("window argument errors") {
    CHECK_THROWS_AS(subpool_window(100, 10, 1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(subpool_window(100, 10, 1.0, 11), InvalidArgument);
    CHECK_THROWS_AS(subpool_window(5, 10, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS(subpool_window(100, 10, 0.0, 1), InvalidArgument);
}

TEST_CASE("feasibility floor is the real value K I / N") {
    CHECK(beta_feasible(0.5, 5, 10, 100));
    CHECK_FALSE(beta_feasible(0.49, 5, 10, 100));
    CHECK(beta_feasible(1.5, 15, 10, 100));
    CHECK_FALSE(beta_feasible(1.4, 15, 10, 100));
}

TEST_CASE("members exclude labeled rows") {
    std::vector<double> scores(100);
    for (std::size_t i = 0; i < 100; ++i) scores[i] = static_cast<double>((i * 37) % 100);
    const SortedPool sp = sort_scores(scores, Metric::Cdd, Direction::Ascending);
    LabelState labels(100);
    labels.commit({1, 1.0, 0, 10, {sp.order[0], sp.order[31], sp.order[35]}, {0, 0, 0}});
    const SubPool pool = make_subpool(sp, 4, 10, 1.0, labels, 5);
    CHECK(pool.window == Window{30, 40});
    CHECK(pool.members.size() == 8);
    for (std::size_t r : pool.members) CHECK_FALSE(labels.is_labeled(r));
    // Members follow sorted-position order.
    for (std::size_t k = 1; k < pool.members.size(); ++k) {
        CHECK(scores[pool.members[k - 1]] < scores[pool.members[k]]);
    }
}

TEST_CASE("an exhausted window widens by N/I per side") {
    const SortedPool sp = identity_pool(100);
    LabelState labels(100);
    std::vector<std::size_t> taken;
    for (std::size_t p = 28; p < 42; ++p) taken.push_back(p);
    labels.commit({1, 1.0, 0, 0, taken, std::vector<double>(taken.size(), 0.0)});
    const SubPool pool = make_subpool(sp, 4, 10, 1.0, labels, 5);
    CHECK(pool.base == Window{30, 40});
    CHECK(pool.widenings == 1);
    CHECK(pool.window == Window{20, 50});
    CHECK(pool.members.size() == 16);
}

TEST_CASE("a fully labeled pool is exhausted") {
    const SortedPool sp = identity_pool(20);
    LabelState labels(20);
    std::vector<std::size_t> all(20);
    std::iota(all.begin(), all.end(), std::size_t{0});
    labels.commit({1, 1.0, 0, 20, all, std::vector<double>(20, 0.0)});
    CHECK_THROWS_AS(make_subpool(sp, 2, 2, 1.0, labels, 1), PoolExhausted);
}

TEST_CASE("make_subpool rejects infeasible beta and bad cycle") {
    const SortedPool sp = identity_pool(100);
    LabelState labels(100);
    CHECK_THROWS_AS(make_subpool(sp, 2, 10, 0.4, labels, 5), InvalidArgument);
    CHECK_THROWS_AS(make_subpool(sp, 11, 10, 1.0, labels, 5), InvalidArgument);
}

TEST_CASE("label state rejects duplicates and replays manifests") {
    LabelState labels(10);
    labels.commit({1, 1.0, 0, 3, {0, 1, 2}, {0, 0, 0}});
    CHECK_THROWS_AS(labels.commit({2, 1.0, 3, 6, {3, 1}, {0, 0}}), InvalidArgument);
    CHECK_FALSE(labels.is_labeled(3));
    CHECK(labels.labeled_count() == 3);
    CHECK_THROWS_AS(labels.commit({2, 1.0, 3, 6, {4, 4}, {0, 0}}), InvalidArgument);
    CHECK_FALSE(labels.is_labeled(4));
    CHECK_THROWS_AS(labels.commit({2, 1.0, 0, 0, {10}, {0}}), InvalidArgument);
    labels.commit({2, 1.0, 3, 6, {5, 3}, {0, 0}});

    const LabelState back = LabelState::replay(10, labels.per_cycle());
    CHECK(back.labeled() == labels.labeled());
    CHECK(back.per_cycle() == labels.per_cycle());
}

TEST_CASE("top-up takes nearest positions outside the window, lower first") {
    const SortedPool sp = identity_pool(20);
    LabelState labels(20);
    labels.commit({1, 1.0, 0, 1, {9}, {0}});
    const std::size_t exclude[] = {10, 11};
    const auto extra = top_up(sp, Window{10, 12}, labels, exclude, 4);
    // Distance 1: 9 (labeled) and 12; distance 2: 8 and 13.
    CHECK(extra == std::vector<std::size_t>{12, 8, 13, 7});
    const auto all = top_up(sp, Window{0, 20}, labels, {}, 3);
    CHECK(all.empty());
}

}
