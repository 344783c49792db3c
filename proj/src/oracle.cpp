#include "bal/oracle.hpp"

namespace bal {

LabelOracle::LabelOracle(std::vector<std::uint32_t> labels, std::uint32_t class_count)
    : labels_(std::move(labels)), class_count_(class_count), revealed_(labels_.size(), false) {
    for (std::uint32_t l : labels_) {
        if (l >= class_count_) throw InvalidArgument("oracle label outside class count");
    }
}

LabelOracle LabelOracle::from_matrix(const FeatureMatrix& m) {
    if (!m.labels) throw InvalidArgument("labeling oracle needs a labeled feature matrix");
    return LabelOracle(*m.labels, m.class_count);
}

void LabelOracle::reveal(std::span<const std::size_t> rows) {
    for (std::size_t r : rows) {
        if (r >= labels_.size()) throw InvalidArgument("row " + std::to_string(r) + " outside oracle");
        if (!revealed_[r]) {
            revealed_[r] = true;
            ++revealed_count_;
        }
    }
}

std::vector<std::uint32_t> LabelOracle::labels_for(std::span<const std::size_t> rows) const {
    std::vector<std::uint32_t> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= labels_.size() || !revealed_[r]) {
            throw InvalidArgument("label of row " + std::to_string(r) + " requested before it was revealed");
        }
        out.push_back(labels_[r]);
    }
    return out;
}

}  // namespace bal
