#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sata {

/// Row-major binary selection matrix for one head (or one tile of a head).
/// Row = query, column = key; a nonzero entry means the query attends the key.
/// Rectangular shapes arise from ragged tiles and zero-skip.
class HeadMask {
public:
    HeadMask() = default;
    HeadMask(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}
    /// Square n x n mask.
    explicit HeadMask(std::size_t n) : HeadMask(n, n) {}

    /// Builds a mask from row strings over {'0','1'}; throws ParseError otherwise.
    static HeadMask from_rows(const std::vector<std::string>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    std::uint8_t at(std::size_t q, std::size_t k) const { return cells_[q * cols_ + k]; }
    void set(std::size_t q, std::size_t k, std::uint8_t v = 1) { cells_[q * cols_ + k] = v; }
    bool selected(std::size_t q, std::size_t k) const { return at(q, k) != 0; }

    std::span<const std::uint8_t> row(std::size_t q) const { return {cells_.data() + q * cols_, cols_}; }
    std::vector<std::uint8_t> column(std::size_t k) const;

    std::size_t row_sum(std::size_t q) const;
    std::size_t col_sum(std::size_t k) const;
    /// Number of selected (query, key) pairs.
    std::size_t support() const;

    std::string row_string(std::size_t q) const;

    friend bool operator==(const HeadMask&, const HeadMask&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Per-layer TopK selection pattern: one N x N mask per head.
struct SelectiveMask {
    std::size_t seq_len = 0;
    std::size_t n_heads = 0;
    std::optional<std::size_t> k_per_query;
    std::vector<HeadMask> heads;

    friend bool operator==(const SelectiveMask&, const SelectiveMask&) = default;
};

struct MaskDiagnostic {
    std::optional<std::size_t> head;
    std::optional<std::size_t> row;
    std::string message;
};

/// One diagnostic per invariant violation; empty when the mask is valid.
std::vector<MaskDiagnostic> validate_mask(const SelectiveMask& mask);

// ---------------------------------------------------------------------------
// Synthetic workloads

enum class LocalityKind { uniform, block, banded };

struct Locality {
    LocalityKind kind = LocalityKind::uniform;
    /// Block count for `block`, band width for `banded`; unused for `uniform`.
    std::size_t param = 0;

    static Locality uniform() { return {}; }
    static Locality block(std::size_t blocks) { return {LocalityKind::block, blocks}; }
    static Locality banded(std::size_t width) { return {LocalityKind::banded, width}; }

    /// Parses "uniform", "block:<b>" or "banded:<w>".
    static Locality parse(const std::string& text);
    std::string to_string() const;
};

struct WorkloadPreset {
    std::string name;
    std::size_t seq_len;
    std::size_t k_per_query;
};

/// Token count and keys-per-query of the published selective-attention models.
std::span<const WorkloadPreset> workload_presets();
const WorkloadPreset& find_preset(const std::string& name);

inline constexpr std::size_t kDefaultHeads = 12;

struct GeneratorSpec {
    std::optional<std::string> preset;
    std::size_t seq_len = 0;
    std::size_t n_heads = kDefaultHeads;
    std::size_t k_per_query = 0;
    Locality locality;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

/// Draws a mask with exactly `k_per_query` selections per row.
///
/// Procedure (one SplitMix64 stream seeded with `spec.seed`, heads in order,
/// rows in order within a head):
///  1. The row's preferred column set C is all columns (uniform), the row's
///     block [j*N/b, (j+1)*N/b) (block), or the width-w window starting at
///     clamp(q - w/2, 0, N - w) (banded).
///  2. If |C| >= K, K distinct columns are drawn from C by a partial
///     Fisher-Yates shuffle of C in ascending order. Otherwise all of C is
///     selected and the remaining K - |C| are drawn the same way from the
///     complement.
///  3. Noise moves m = min(floor(noise*K), N-K) selections: m distinct
///     selected columns are drawn (partial Fisher-Yates over the ascending
///     selected list) and cleared, then m distinct columns are drawn from the
///     ascending list of columns that were unselected before step 3 and set.
///
/// Throws InvalidArgument for an unknown preset, K == 0, K > N, noise outside
/// [0,1], or a zero block count / band width.
SelectiveMask generate_mask(const GeneratorSpec& spec);

// ---------------------------------------------------------------------------
// sata-mask file format

/// Canonical serialization: byte-identical for equal masks.
std::string mask_to_json(const SelectiveMask& mask);
/// Parses and validates; ParseError for format violations, ValidationError for
/// invariant violations.
SelectiveMask mask_from_json(const std::string& text);

void save_mask(const SelectiveMask& mask, const std::filesystem::path& path);
SelectiveMask load_mask(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sata
