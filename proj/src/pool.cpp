#include "bal/pool.hpp"

#include <algorithm>
#include <cmath>

namespace bal {

namespace {

// Half-up rounding; the nudge keeps exact .5 endpoints from falling below
// the tie through representation error.
std::size_t round_clamped(double x, std::size_t n) {
    const double r = std::floor(x + 0.5 + 1e-9);
    if (r <= 0.0) return 0;
    if (r >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(r);
}

void check_cycle_args(std::size_t n, std::size_t cycles, double beta, std::size_t cycle) {
    if (cycles == 0) throw InvalidArgument("cycle count must be >= 1");
    if (cycle < 1 || cycle > cycles) {
        throw InvalidArgument("cycle " + std::to_string(cycle) + " outside [1, " + std::to_string(cycles) + "]");
    }
    if (n < cycles) throw InvalidArgument("pool of " + std::to_string(n) + " rows is smaller than cycle count");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive and finite");
}

}  // namespace

Window subpool_window(std::size_t n, std::size_t cycles, double beta, std::size_t cycle) {
    check_cycle_args(n, cycles, beta, cycle);
    const double nd = static_cast<double>(n);
    const double id = static_cast<double>(cycles);
    Window w;
    if (cycle == 1) {
        w = {0, round_clamped(beta * nd / id, n)};
    } else if (cycle == cycles) {
        w = {round_clamped(nd - beta * nd / id, n), n};
    } else {
        const double base = static_cast<double>(cycle - 1);
        w.start = round_clamped((base + (1.0 - beta) / 2.0) * nd / id, n);
        w.end = round_clamped((base + (1.0 + beta) / 2.0) * nd / id, n);
    }
    w.end = std::max(w.start, w.end);
    return w;
}

bool beta_feasible(double beta, std::size_t budget, std::size_t cycles, std::size_t n) {
    const double need = static_cast<double>(budget) * static_cast<double>(cycles);
    return beta * static_cast<double>(n) >= need * (1.0 - 1e-12);
}

void LabelState::commit(SelectionManifest manifest) {
    mark(manifest.selected);
    per_cycle_.push_back(std::move(manifest));
}

void LabelState::mark(std::span<const std::size_t> rows) {
    for (std::size_t r : rows) {
        if (r >= mask_.size()) throw InvalidArgument("row " + std::to_string(r) + " outside pool");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (mask_[rows[i]]) {
            for (std::size_t j = 0; j < i; ++j) mask_[rows[j]] = false;
            throw InvalidArgument("row " + std::to_string(rows[i]) + " labeled twice");
        }
        mask_[rows[i]] = true;
    }
    labeled_.insert(labeled_.end(), rows.begin(), rows.end());
}

LabelState LabelState::replay(std::size_t n, std::span<const SelectionManifest> manifests) {
    LabelState state(n);
    for (const auto& m : manifests) state.commit(m);
    return state;
}

SubPool make_subpool(const SortedPool& sp, std::size_t cycle, std::size_t cycles, double beta, const LabelState& labels,
                     std::size_t budget) {
    const std::size_t n = sp.size();
    check_cycle_args(n, cycles, beta, cycle);
    if (labels.pool_size() != n) throw InvalidArgument("label state and sorted pool differ in size");
    if (!beta_feasible(beta, budget, cycles, n)) {
        throw InvalidArgument("beta " + std::to_string(beta) + " below feasibility floor K*I/N = " +
                              std::to_string(static_cast<double>(budget * cycles) / static_cast<double>(n)));
    }

    SubPool pool;
    pool.cycle = cycle;
    pool.beta = beta;
    pool.base = subpool_window(n, cycles, beta, cycle);
    pool.window = pool.base;

    auto collect = [&] {
        pool.members.clear();
        for (std::size_t p = pool.window.start; p < pool.window.end; ++p) {
            if (!labels.is_labeled(sp.order[p])) pool.members.push_back(sp.order[p]);
        }
    };
    collect();

    const std::size_t step = std::max<std::size_t>(1, round_clamped(static_cast<double>(n) / cycles, n));
    while (pool.members.size() < budget && (pool.window.start > 0 || pool.window.end < n)) {
        pool.window.start = pool.window.start > step ? pool.window.start - step : 0;
        pool.window.end = std::min(n, pool.window.end + step);
        ++pool.widenings;
        collect();
    }
    if (pool.members.empty()) {
        throw PoolExhausted("cycle " + std::to_string(cycle) + ": no unlabeled rows left in the pool");
    }
    return pool;
}

std::vector<std::size_t> top_up(const SortedPool& sp, const Window& window, const LabelState& labels,
                                std::span<const std::size_t> exclude, std::size_t count) {
    const std::size_t n = sp.size();
    std::vector<bool> skip(n, false);
    for (std::size_t r : exclude) skip[r] = true;
    std::vector<std::size_t> out;
    std::size_t below = window.start;  // next candidate is below - 1
    std::size_t above = window.end;
    while (out.size() < count && (below > 0 || above < n)) {
        const std::size_t dist_below = below > 0 ? window.start - (below - 1) : n + 1;
        const std::size_t dist_above = above < n ? above - window.end + 1 : n + 1;
        std::size_t pos = 0;
        if (dist_below <= dist_above) {
            pos = --below;
        } else {
            pos = above++;
        }
        const std::size_t row = sp.order[pos];
        if (!labels.is_labeled(row) && !skip[row]) out.push_back(row);
    }
    return out;
}

CoverageReport subpool_coverage(std::size_t cycles, double beta, std::size_t n) {
    CoverageReport report;
    std::vector<std::size_t> hits(n, 0);
    for (std::size_t i = 1; i <= cycles; ++i) {
        const Window w = subpool_window(n, cycles, beta, i);
        report.windows.push_back(w);
        for (std::size_t p = w.start; p < w.end; ++p) ++hits[p];
    }
    for (std::size_t i = 0; i + 1 < report.windows.size(); ++i) {
        const Window& a = report.windows[i];
        const Window& b = report.windows[i + 1];
        report.overlaps.push_back(a.end > b.start ? std::min(a.end, b.end) - std::max(a.start, b.start) : 0);
        report.gaps.push_back(b.start > a.end ? b.start - a.end : 0);
    }
    report.uncovered = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 0));
    report.exact_tiling = std::all_of(hits.begin(), hits.end(), [](std::size_t h) { return h == 1; });
    return report;
}

}  // namespace bal
