#include "bal/featio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bal {

namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'M', 'A', 'T'};
constexpr std::uint32_t kFlagLabels = 1u;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        out.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
    }
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
    T value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        value |= static_cast<T>(in[offset + b]) << (8 * b);
    }
    return value;
}

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

const char* to_string(FormatErrorKind kind) {
    switch (kind) {
        case FormatErrorKind::BadMagic: return "bad magic";
        case FormatErrorKind::BadVersion: return "unsupported version";
        case FormatErrorKind::Truncated: return "truncated payload";
        case FormatErrorKind::TrailingData: return "trailing data";
        case FormatErrorKind::NonFinite: return "non-finite value";
        case FormatErrorKind::LabelMismatch: return "label mismatch";
        case FormatErrorKind::RaggedRow: return "ragged row";
        case FormatErrorKind::NonNumeric: return "non-numeric cell";
        case FormatErrorKind::EmptyFile: return "empty file";
        case FormatErrorKind::Io: return "i/o failure";
    }
    return "unknown";
}

void FeatureMatrix::validate() const {
    if (data.size() != n_rows * n_cols) {
        throw FormatError(FormatErrorKind::Truncated,
                          "data holds " + std::to_string(data.size()) + " values, expected " +
                              std::to_string(n_rows * n_cols));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw FormatError(FormatErrorKind::NonFinite,
                              "row " + std::to_string(i / std::max<std::size_t>(n_cols, 1)) + " col " +
                                  std::to_string(i % std::max<std::size_t>(n_cols, 1)));
        }
    }
    if (labels) {
        if (labels->size() != n_rows) {
            throw FormatError(FormatErrorKind::LabelMismatch,
                              std::to_string(labels->size()) + " labels for " + std::to_string(n_rows) + " rows");
        }
        for (std::size_t i = 0; i < labels->size(); ++i) {
            if ((*labels)[i] >= class_count) {
                throw FormatError(FormatErrorKind::LabelMismatch,
                                  "label " + std::to_string((*labels)[i]) + " at row " + std::to_string(i) +
                                      " not below class_count " + std::to_string(class_count));
            }
        }
    }
}

FeatureMatrix FeatureMatrix::without_labels() const {
    FeatureMatrix out;
    out.n_rows = n_rows;
    out.n_cols = n_cols;
    out.data = data;
    return out;
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> rows) const {
    FeatureMatrix out;
    out.n_rows = rows.size();
    out.n_cols = n_cols;
    out.class_count = class_count;
    out.data.reserve(rows.size() * n_cols);
    for (std::size_t r : rows) {
        auto src = row(r);
        out.data.insert(out.data.end(), src.begin(), src.end());
    }
    if (labels) {
        std::vector<std::uint32_t> sub;
        sub.reserve(rows.size());
        for (std::size_t r : rows) sub.push_back((*labels)[r]);
        out.labels = std::move(sub);
    }
    return out;
}

std::vector<std::uint8_t> encode_fmat(const FeatureMatrix& m) {
    m.validate();
    std::vector<std::uint8_t> out;
    out.reserve(kFmatHeaderBytes + 4 * m.data.size() + (m.labels ? 4 * m.n_rows : 0));
    for (std::uint8_t b : kMagic) out.push_back(b);
    put_le<std::uint32_t>(out, kFmatVersion);
    put_le<std::uint32_t>(out, m.labels ? kFlagLabels : 0u);
    put_le<std::uint64_t>(out, m.n_rows);
    put_le<std::uint64_t>(out, m.n_cols);
    put_le<std::uint32_t>(out, m.class_count);
    for (float v : m.data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
    if (m.labels) {
        for (std::uint32_t l : *m.labels) put_le<std::uint32_t>(out, l);
    }
    return out;
}

FeatureMatrix decode_fmat(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw FormatError(FormatErrorKind::BadMagic, "file does not start with FMAT");
    }
    if (bytes.size() < kFmatHeaderBytes) {
        throw FormatError(FormatErrorKind::Truncated, "header needs 32 bytes, got " + std::to_string(bytes.size()));
    }
    const auto version = get_le<std::uint32_t>(bytes, 4);
    if (version != kFmatVersion) {
        throw FormatError(FormatErrorKind::BadVersion, "version " + std::to_string(version));
    }
    const auto flags = get_le<std::uint32_t>(bytes, 8);
    FeatureMatrix m;
    const auto n_rows = get_le<std::uint64_t>(bytes, 12);
    const auto n_cols = get_le<std::uint64_t>(bytes, 20);
    m.class_count = get_le<std::uint32_t>(bytes, 28);
    const bool has_labels = (flags & kFlagLabels) != 0;

    // Guard the size arithmetic before trusting header counts.
    const std::uint64_t available = bytes.size() - kFmatHeaderBytes;
    if (n_cols != 0 && n_rows > available / 4 / n_cols) {
        throw FormatError(FormatErrorKind::Truncated, "header claims more values than the file holds");
    }
    if (has_labels && n_rows > available / 4) {
        throw FormatError(FormatErrorKind::Truncated, "header claims more labels than the file holds");
    }
    const std::uint64_t values = n_rows * n_cols;
    const std::uint64_t expected = 4 * values + (has_labels ? 4 * n_rows : 0);
    if (available < expected) {
        throw FormatError(FormatErrorKind::Truncated, "payload has " + std::to_string(available) +
                                                          " bytes, header requires " + std::to_string(expected));
    }
    if (available > expected) {
        throw FormatError(FormatErrorKind::TrailingData,
                          std::to_string(available - expected) + " bytes after payload");
    }
    m.n_rows = static_cast<std::size_t>(n_rows);
    m.n_cols = static_cast<std::size_t>(n_cols);
    m.data.resize(static_cast<std::size_t>(values));
    std::size_t offset = kFmatHeaderBytes;
    for (auto& v : m.data) {
        v = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
        offset += 4;
    }
    if (has_labels) {
        std::vector<std::uint32_t> labels(m.n_rows);
        for (auto& l : labels) {
            l = get_le<std::uint32_t>(bytes, offset);
            offset += 4;
        }
        m.labels = std::move(labels);
    }
    m.validate();
    return m;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw FormatError(FormatErrorKind::Io, "write failed for " + path.string());
}

FeatureMatrix read_fmat(const std::filesystem::path& path) {
    const std::string raw = read_text_file(path);
    return decode_fmat({reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
}

void write_fmat(const FeatureMatrix& m, const std::filesystem::path& path) {
    const auto bytes = encode_fmat(m);
    write_text_file(path, std::string(bytes.begin(), bytes.end()));
}

FeatureMatrix parse_csv(const std::string& text, bool has_label_column) {
    FeatureMatrix m;
    std::vector<std::uint32_t> labels;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(line);
        if (content.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(content);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
        if (content.back() == ',') cells.emplace_back();
        if (m.n_rows == 0) {
            width = cells.size();
            if (has_label_column && width < 2) {
                throw FormatError(FormatErrorKind::RaggedRow, "label column requires at least two columns");
            }
        } else if (cells.size() != width) {
            throw FormatError(FormatErrorKind::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                                              std::to_string(cells.size()) + " cells, expected " +
                                                              std::to_string(width));
        }
        const std::size_t n_features = has_label_column ? width - 1 : width;
        for (std::size_t c = 0; c < n_features; ++c) {
            const auto& s = cells[c];
            float v = 0.0f;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
                throw FormatError(FormatErrorKind::NonNumeric,
                                  "line " + std::to_string(line_no) + " col " + std::to_string(c) + ": '" + s + "'");
            }
            m.data.push_back(v);
        }
        if (has_label_column) {
            const auto& s = cells.back();
            std::uint32_t l = 0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), l);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
                throw FormatError(FormatErrorKind::NonNumeric,
                                  "line " + std::to_string(line_no) + " label: '" + s + "'");
            }
            labels.push_back(l);
        }
        ++m.n_rows;
    }
    if (m.n_rows == 0) throw FormatError(FormatErrorKind::EmptyFile, "no data rows");
    m.n_cols = has_label_column ? width - 1 : width;
    if (has_label_column) {
        m.class_count = *std::max_element(labels.begin(), labels.end()) + 1;
        m.labels = std::move(labels);
    }
    m.validate();
    return m;
}

FeatureMatrix read_csv(const std::filesystem::path& path, bool has_label_column) {
    return parse_csv(read_text_file(path), has_label_column);
}

std::string format_manifest_line(const SelectionManifest& m) {
    nlohmann::ordered_json j;
    j["cycle"] = m.cycle;
    j["beta"] = m.beta;
    j["subpool_start"] = m.subpool_start;
    j["subpool_end"] = m.subpool_end;
    j["selected"] = m.selected;
    j["scores"] = m.scores;
    return j.dump();
}

SelectionManifest parse_manifest_line(const std::string& line) {
    try {
        const auto j = nlohmann::json::parse(line);
        SelectionManifest m;
        m.cycle = j.at("cycle").get<std::size_t>();
        m.beta = j.at("beta").get<double>();
        m.subpool_start = j.at("subpool_start").get<std::size_t>();
        m.subpool_end = j.at("subpool_end").get<std::size_t>();
        m.selected = j.at("selected").get<std::vector<std::size_t>>();
        m.scores = j.at("scores").get<std::vector<double>>();
        if (m.scores.size() != m.selected.size()) {
            throw FormatError(FormatErrorKind::LabelMismatch, "scores and selected differ in length");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(FormatErrorKind::NonNumeric, std::string("manifest line: ") + e.what());
    }
}

void write_manifest(std::span<const SelectionManifest> manifests, const std::filesystem::path& path) {
    std::string text;
    for (const auto& m : manifests) {
        text += format_manifest_line(m);
        text += '\n';
    }
    write_text_file(path, text);
}

std::vector<SelectionManifest> read_manifest(const std::filesystem::path& path) {
    std::vector<SelectionManifest> out;
    std::istringstream in(read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        out.push_back(parse_manifest_line(line));
    }
    return out;
}

}  // namespace bal
