#include "bal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace bal {

void MixtureSpec::validate() const {
    if (classes < 2) throw InvalidArgument("mixture needs at least two classes");
    if (per_class < 1) throw InvalidArgument("mixture needs at least one row per class");
    if (dim < 2) throw InvalidArgument("mixture needs dimension >= 2");
    if (!(spread >= 0.0) || !(separation >= 0.0)) throw InvalidArgument("spread and separation must be >= 0");
}

Matrix synth_centers(const MixtureSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uniform(-spec.separation, spec.separation);
    Matrix centers(spec.classes, spec.dim);
    for (double& v : centers.values()) v = uniform(rng);
    return centers;
}

FeatureMatrix synth_generate(const MixtureSpec& spec) {
    const Matrix centers = synth_centers(spec);
    // Point noise uses its own stream so centers do not depend on counts.
    std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> noise(0.0, 1.0);

    const std::size_t n = spec.classes * spec.per_class;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    FeatureMatrix m;
    m.n_rows = n;
    m.n_cols = spec.dim;
    m.class_count = static_cast<std::uint32_t>(spec.classes);
    m.data.resize(n * spec.dim);
    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = order[i] / spec.per_class;
        labels[i] = static_cast<std::uint32_t>(c);
        for (std::size_t d = 0; d < spec.dim; ++d) {
            m.data[i * spec.dim + d] = static_cast<float>(centers(c, d) + spec.spread * noise(rng));
        }
    }
    m.labels = std::move(labels);
    return m;
}

SortedPool random_order_pool(std::size_t n, std::uint64_t seed) {
    SortedPool sp;
    sp.order.resize(n);
    std::iota(sp.order.begin(), sp.order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(sp.order.begin(), sp.order.end(), rng);
    sp.scores.assign(n, 0.0);
    return sp;
}

double normalized_class_entropy(const std::vector<std::size_t>& histogram) {
    if (histogram.size() < 2) throw InvalidArgument("class balance needs at least two classes");
    const double total = static_cast<double>(std::accumulate(histogram.begin(), histogram.end(), std::size_t{0}));
    if (total == 0.0) throw InvalidArgument("class balance of an empty selection");
    double h = 0.0;
    for (std::size_t count : histogram) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / total;
        h -= p * std::log(p);
    }
    return std::clamp(h / std::log(static_cast<double>(histogram.size())), 0.0, 1.0);
}

std::vector<double> subpool_class_balance(const RunState& run, const FeatureMatrix& labeled) {
    if (!labeled.labels) throw InvalidArgument("class balance needs labeled features");
    std::vector<double> out;
    for (const auto& m : run.labels.per_cycle()) {
        if (m.selected.empty()) throw InvalidArgument("cycle " + std::to_string(m.cycle) + " selected nothing");
        std::vector<std::size_t> hist(labeled.class_count, 0);
        for (std::size_t r : m.selected) {
            if (r >= labeled.n_rows) throw InvalidArgument("manifest row outside feature matrix");
            ++hist[(*labeled.labels)[r]];
        }
        out.push_back(normalized_class_entropy(hist));
    }
    return out;
}

ComparisonTable compare_traces(const std::vector<CycleRecord>& a, const std::vector<CycleRecord>& b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("runs differ in cycle count: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    ComparisonTable table;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].cycle != b[i].cycle || std::abs(a[i].lambda - b[i].lambda) > 1e-9) {
            throw InvalidArgument("runs differ in labeling grid at cycle " + std::to_string(a[i].cycle));
        }
        table.rows.push_back({a[i].cycle, a[i].lambda, a[i].accuracy, b[i].accuracy, a[i].accuracy - b[i].accuracy});
    }
    if (!table.rows.empty()) table.final_delta = table.rows.back().delta;
    return table;
}

ComparisonTable compare_runs(const RunState& a, const RunState& b) {
    return compare_traces(a.cycles, b.cycles);
}

std::string ComparisonTable::to_csv() const {
    std::string out = "cycle,lambda,accuracy_a,accuracy_b,delta\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%+.6f\n", r.cycle, r.lambda, r.accuracy_a, r.accuracy_b,
                      r.delta);
        out += buf;
    }
    return out;
}

}  // namespace bal
