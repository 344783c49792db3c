#ifndef BAL_POOL_HPP
#define BAL_POOL_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "bal/cdd.hpp"
#include "bal/featio.hpp"

namespace bal {

// Half-open range of sorted positions.
struct Window {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    bool contains(std::size_t pos) const { return pos >= start && pos < end; }
    bool operator==(const Window&) const = default;
};

// Sub-pool window of cycle `cycle` (1-based) out of `cycles` for a pool of
// n sorted rows:
//   first cycle   [0, r(b n/I))
//   interior      [r((i-1 + (1-b)/2) n/I), r((i-1 + (1+b)/2) n/I))
//   last cycle    [r(n - b n/I), n)
// with r() rounding half up and every bound clamped to [0, n].
Window subpool_window(std::size_t n, std::size_t cycles, double beta, std::size_t cycle);

// True when a window of width beta * n / cycles can hold `budget` rows.
bool beta_feasible(double beta, std::size_t budget, std::size_t cycles, std::size_t n);

// Rows labeled so far and the manifests that labeled them.
class LabelState {
public:
    LabelState() = default;
    explicit LabelState(std::size_t n) : mask_(n, false) {}

    std::size_t pool_size() const { return mask_.size(); }
    bool is_labeled(std::size_t row) const { return mask_[row]; }
    std::size_t labeled_count() const { return labeled_.size(); }
    // Rows in the order they were labeled.
    const std::vector<std::size_t>& labeled() const { return labeled_; }
    const std::vector<SelectionManifest>& per_cycle() const { return per_cycle_; }

    // Appends a manifest; throws if any selected row is out of range or
    // already labeled.
    void commit(SelectionManifest manifest);
    // Marks rows labeled without a manifest of their own.
    void mark(std::span<const std::size_t> rows);
    // Rewrites the beta recorded in one manifest (position, not cycle).
    void set_manifest_beta(std::size_t index, double beta) { per_cycle_.at(index).beta = beta; }

    // Rebuilds state by committing manifests in order.
    static LabelState replay(std::size_t n, std::span<const SelectionManifest> manifests);

private:
    std::vector<bool> mask_;
    std::vector<std::size_t> labeled_;
    std::vector<SelectionManifest> per_cycle_;
};

struct SubPool {
    std::size_t cycle = 1;
    // Window after any widening; `base` is the formula window.
    Window window;
    Window base;
    // Unlabeled rows in the window, in sorted-position order.
    std::vector<std::size_t> members;
    double beta = 1.0;
    std::size_t widenings = 0;
};

// Builds the cycle's sub-pool and removes labeled rows. When fewer than
// `budget` unlabeled rows remain, the window grows by n/cycles positions on
// each side until it holds `budget` of them or covers the whole pool.
// Throws PoolExhausted when no unlabeled row is left at all.
SubPool make_subpool(const SortedPool& sp, std::size_t cycle, std::size_t cycles, double beta, const LabelState& labels,
                     std::size_t budget);

class PoolExhausted : public Error {
public:
    using Error::Error;
};

// Up to `count` unlabeled rows outside `window`, nearest to it in sorted
// position first (lower position on equal distance), skipping `exclude`.
std::vector<std::size_t> top_up(const SortedPool& sp, const Window& window, const LabelState& labels,
                                std::span<const std::size_t> exclude, std::size_t count);

struct CoverageReport {
    std::vector<Window> windows;
    // overlaps[i] / gaps[i] describe windows i and i+1 (0-based).
    std::vector<std::size_t> overlaps;
    std::vector<std::size_t> gaps;
    // Windows are pairwise disjoint and their union is [0, n).
    bool exact_tiling = false;
    // Positions in no window.
    std::size_t uncovered = 0;
};

CoverageReport subpool_coverage(std::size_t cycles, double beta, std::size_t n);

}  // namespace bal

#endif  // BAL_POOL_HPP
