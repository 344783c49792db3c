#ifndef BAL_ORACLE_HPP
#define BAL_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bal/featio.hpp"

namespace bal {

// Holds the ground truth and hands out a row's label only after that row
// has been revealed. Scoring and sub-pool code never sees this object.
class LabelOracle {
public:
    LabelOracle(std::vector<std::uint32_t> labels, std::uint32_t class_count);
    // Takes the labels out of a labeled matrix.
    static LabelOracle from_matrix(const FeatureMatrix& m);

    std::size_t size() const { return labels_.size(); }
    std::uint32_t class_count() const { return class_count_; }

    void reveal(std::span<const std::size_t> rows);
    bool revealed(std::size_t row) const { return revealed_[row]; }
    std::size_t revealed_count() const { return revealed_count_; }

    // Throws InvalidArgument if any row has not been revealed.
    std::vector<std::uint32_t> labels_for(std::span<const std::size_t> rows) const;

private:
    std::vector<std::uint32_t> labels_;
    std::uint32_t class_count_;
    std::vector<bool> revealed_;
    std::size_t revealed_count_ = 0;
};

}  // namespace bal

#endif  // BAL_ORACLE_HPP
