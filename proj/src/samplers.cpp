#include "bal/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "bal/clustering.hpp"

namespace bal {

namespace {

// Picks k members by score; lower_is_better selects the smallest scores.
Selection take_by_score(std::span<const std::size_t> members, const std::vector<double>& scores, std::size_t k,
                        bool lower_is_better) {
    std::vector<std::size_t> idx(members.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return lower_is_better ? scores[a] < scores[b] : scores[a] > scores[b];
        return members[a] < members[b];
    });
    Selection sel;
    const std::size_t take = std::min(k, members.size());
    sel.shortfall = k - take;
    for (std::size_t r = 0; r < take; ++r) {
        sel.indices.push_back(members[idx[r]]);
        sel.scores.push_back(scores[idx[r]]);
    }
    return sel;
}

}  // namespace

const char* to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::Confidence: return "confidence";
        case SamplerKind::Entropy: return "entropy";
        case SamplerKind::Cluster: return "cluster";
        case SamplerKind::Random: return "random";
    }
    return "unknown";
}

SamplerKind parse_sampler(const std::string& s) {
    if (s == "confidence") return SamplerKind::Confidence;
    if (s == "entropy") return SamplerKind::Entropy;
    if (s == "cluster") return SamplerKind::Cluster;
    if (s == "random") return SamplerKind::Random;
    throw InvalidArgument("unknown sampler '" + s + "'");
}

bool needs_posteriors(SamplerKind kind) {
    return kind == SamplerKind::Confidence || kind == SamplerKind::Entropy;
}

Selection select_first_cycle(const SortedPool& sp, std::size_t k) {
    if (k > sp.size()) {
        throw InvalidArgument("first-cycle budget " + std::to_string(k) + " exceeds pool size " +
                              std::to_string(sp.size()));
    }
    Selection sel;
    sel.indices.assign(sp.order.begin(), sp.order.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t r : sel.indices) sel.scores.push_back(sp.scores[r]);
    return sel;
}

void validate_probabilities(const Matrix& probs, std::size_t expected_rows) {
    if (probs.rows() != expected_rows) {
        throw InvalidArgument("posterior matrix has " + std::to_string(probs.rows()) + " rows, expected " +
                              std::to_string(expected_rows));
    }
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        double sum = 0.0;
        for (double p : probs.row(r)) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                throw InvalidArgument("posterior row " + std::to_string(r) + " has an invalid probability");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-5) {
            throw InvalidArgument("posterior row " + std::to_string(r) + " sums to " + std::to_string(sum));
        }
    }
}

double max_probability(std::span<const double> p) {
    return p.empty() ? 0.0 : *std::max_element(p.begin(), p.end());
}

double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

Selection select_confidence(std::span<const std::size_t> members, const Matrix& probs, std::size_t k) {
    validate_probabilities(probs, members.size());
    std::vector<double> scores(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) scores[r] = max_probability(probs.row(r));
    return take_by_score(members, scores, k, true);
}

Selection select_entropy(std::span<const std::size_t> members, const Matrix& probs, std::size_t k) {
    validate_probabilities(probs, members.size());
    std::vector<double> scores(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) scores[r] = entropy(probs.row(r));
    return take_by_score(members, scores, k, false);
}

Selection select_cluster(std::span<const std::size_t> members, const FeatureMatrix& features, std::size_t k,
                         std::uint64_t seed) {
    if (k > members.size()) {
        throw InvalidArgument("cluster sampler asked for " + std::to_string(k) + " of " +
                              std::to_string(members.size()) + " members");
    }
    Selection sel;
    if (k == 0) return sel;
    const FeatureMatrix sub = features.subset(members);
    const Clustering c = kmeans_fit(sub, {.k = k, .seed = seed});
    std::vector<bool> taken(members.size(), false);
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t best = members.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < members.size(); ++r) {
            if (taken[r]) continue;
            const double d = squared_distance(sub.row(r), c.centroids.row(j));
            if (d < best_d || (d == best_d && members[r] < members[best])) {
                best_d = d;
                best = r;
            }
        }
        taken[best] = true;
        sel.indices.push_back(members[best]);
        sel.scores.push_back(best_d);
    }
    return sel;
}

Selection select_random(std::span<const std::size_t> members, std::size_t k, std::uint64_t seed) {
    if (k > members.size()) {
        throw InvalidArgument("random sampler asked for " + std::to_string(k) + " of " +
                              std::to_string(members.size()) + " members");
    }
    Selection sel;
    std::mt19937_64 rng(seed);
    std::sample(members.begin(), members.end(), std::back_inserter(sel.indices), k, rng);
    sel.scores.assign(sel.indices.size(), 0.0);
    return sel;
}

Selection sample(SamplerKind kind, const SamplerInputs& in, std::size_t k) {
    const std::size_t take = std::min(k, in.members.size());
    Selection sel;
    switch (kind) {
        case SamplerKind::Confidence:
        case SamplerKind::Entropy:
            if (!in.probs) throw InvalidArgument(std::string(to_string(kind)) + " sampler needs posteriors");
            return kind == SamplerKind::Confidence ? select_confidence(in.members, *in.probs, k)
                                                   : select_entropy(in.members, *in.probs, k);
        case SamplerKind::Cluster:
            if (!in.features) throw InvalidArgument("cluster sampler needs features");
            sel = select_cluster(in.members, *in.features, take, in.seed);
            break;
        case SamplerKind::Random:
            sel = select_random(in.members, take, in.seed);
            break;
    }
    sel.shortfall = k - take;
    return sel;
}

}  // namespace bal
