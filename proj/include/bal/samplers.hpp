#ifndef BAL_SAMPLERS_HPP
#define BAL_SAMPLERS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bal/cdd.hpp"
#include "bal/featio.hpp"
#include "bal/matrix.hpp"

namespace bal {

enum class SamplerKind { Confidence, Entropy, Cluster, Random };

const char* to_string(SamplerKind kind);
SamplerKind parse_sampler(const std::string& s);

struct Selection {
    std::vector<std::size_t> indices;
    std::vector<double> scores;
    // Rows still owed when the pool held fewer than the request.
    std::size_t shortfall = 0;
};

// Head of the sorted order: rows at positions [0, k). Scores are the pool
// scores of those rows.
Selection select_first_cycle(const SortedPool& sp, std::size_t k);

// Throws InvalidArgument unless every row is non-negative and sums to 1
// within 1e-5.
void validate_probabilities(const Matrix& probs, std::size_t expected_rows);

double max_probability(std::span<const double> p);
// Natural-log entropy with 0 log 0 = 0.
double entropy(std::span<const double> p);

// The k members with the lowest maximum posterior. probs row r belongs to
// members[r]. Ties go to the lower row index. If k exceeds the member count
// every member is returned and the gap is reported as shortfall.
Selection select_confidence(std::span<const std::size_t> members, const Matrix& probs, std::size_t k);

// Same contract, picking the k highest-entropy members.
Selection select_entropy(std::span<const std::size_t> members, const Matrix& probs, std::size_t k);

// k-means with k clusters over the member features, then the nearest
// unpicked member to each centroid. Throws if k exceeds the member count.
Selection select_cluster(std::span<const std::size_t> members, const FeatureMatrix& features, std::size_t k,
                         std::uint64_t seed);

// Uniform sample without replacement. Throws if k exceeds the member count.
Selection select_random(std::span<const std::size_t> members, std::size_t k, std::uint64_t seed);

// Everything a sampler might need for one cycle.
struct SamplerInputs {
    std::span<const std::size_t> members;
    // Posterior rows aligned with members; required for Confidence/Entropy.
    const Matrix* probs = nullptr;
    // Full pool features; required for Cluster.
    const FeatureMatrix* features = nullptr;
    std::uint64_t seed = 0;
};

bool needs_posteriors(SamplerKind kind);

// Dispatches to one sampler. Short pools never throw here: all members are
// taken and the remainder reported as shortfall.
Selection sample(SamplerKind kind, const SamplerInputs& in, std::size_t k);

}  // namespace bal

#endif  // BAL_SAMPLERS_HPP
