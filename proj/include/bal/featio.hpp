#ifndef BAL_FEATIO_HPP
#define BAL_FEATIO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bal/error.hpp"

namespace bal {

// N x D pool of feature vectors, row-major f32, with optional ground-truth
// labels in [0, class_count).
struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<float> data;
    std::optional<std::vector<std::uint32_t>> labels;
    // 0 when the class count is unknown.
    std::uint32_t class_count = 0;

    std::span<const float> row(std::size_t i) const { return {data.data() + i * n_cols, n_cols}; }
    bool has_labels() const { return labels.has_value(); }

    // Throws FormatError when any invariant is broken.
    void validate() const;

    // Copy with labels and class count removed.
    FeatureMatrix without_labels() const;
    // Rows in the given order; labels follow when present.
    FeatureMatrix subset(std::span<const std::size_t> rows) const;

    bool operator==(const FeatureMatrix&) const = default;
};

enum class FormatErrorKind {
    BadMagic,
    BadVersion,
    Truncated,
    TrailingData,
    NonFinite,
    LabelMismatch,
    RaggedRow,
    NonNumeric,
    EmptyFile,
    Io,
};

const char* to_string(FormatErrorKind kind);

class FormatError : public Error {
public:
    FormatError(FormatErrorKind kind, const std::string& what)
        : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    FormatErrorKind kind() const { return kind_; }

private:
    FormatErrorKind kind_;
};

// FMAT binary layout, little-endian:
//   "FMAT" | version u32 = 1 | flags u32 (bit0 = labels) | n_rows u64 |
//   n_cols u64 | class_count u32 | f32 payload | u32 labels (iff bit0)
inline constexpr std::uint32_t kFmatVersion = 1;
inline constexpr std::size_t kFmatHeaderBytes = 32;

std::vector<std::uint8_t> encode_fmat(const FeatureMatrix& m);
FeatureMatrix decode_fmat(std::span<const std::uint8_t> bytes);

FeatureMatrix read_fmat(const std::filesystem::path& path);
void write_fmat(const FeatureMatrix& m, const std::filesystem::path& path);

// Rectangular numeric CSV, no header. With has_label_column the last column
// holds non-negative integer class ids and class_count = max label + 1.
FeatureMatrix parse_csv(const std::string& text, bool has_label_column);
FeatureMatrix read_csv(const std::filesystem::path& path, bool has_label_column);

// One cycle's newly labeled rows.
struct SelectionManifest {
    std::size_t cycle = 1;
    double beta = 1.0;
    std::size_t subpool_start = 0;
    std::size_t subpool_end = 0;
    std::vector<std::size_t> selected;
    std::vector<double> scores;

    bool operator==(const SelectionManifest&) const = default;
};

// JSON lines; one manifest per line, keys cycle, beta, subpool_start,
// subpool_end, selected, scores.
std::string format_manifest_line(const SelectionManifest& m);
SelectionManifest parse_manifest_line(const std::string& line);

void write_manifest(std::span<const SelectionManifest> manifests, const std::filesystem::path& path);
std::vector<SelectionManifest> read_manifest(const std::filesystem::path& path);

// Whole-file helpers shared by the run-directory writers.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bal

#endif  // BAL_FEATIO_HPP
