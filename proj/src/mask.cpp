#include "sata/mask.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "sata/error.hpp"
#include "sata/rng.hpp"

namespace sata {

HeadMask HeadMask::from_rows(const std::vector<std::string>& rows) {
    const std::size_t n_rows = rows.size();
    const std::size_t n_cols = n_rows == 0 ? 0 : rows.front().size();
    HeadMask mask(n_rows, n_cols);
    for (std::size_t q = 0; q < n_rows; ++q) {
        if (rows[q].size() != n_cols) {
            throw ParseError("row " + std::to_string(q) + ": length " + std::to_string(rows[q].size()) +
                             ", expected " + std::to_string(n_cols));
        }
        for (std::size_t k = 0; k < n_cols; ++k) {
            const char c = rows[q][k];
            if (c != '0' && c != '1') {
                throw ParseError("row " + std::to_string(q) + ": illegal character at column " +
                                 std::to_string(k));
            }
            mask.set(q, k, c == '1' ? 1 : 0);
        }
    }
    return mask;
}

std::vector<std::uint8_t> HeadMask::column(std::size_t k) const {
    std::vector<std::uint8_t> out(rows_);
    for (std::size_t q = 0; q < rows_; ++q) out[q] = at(q, k);
    return out;
}

std::size_t HeadMask::row_sum(std::size_t q) const {
    const auto r = row(q);
    return static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](std::uint8_t v) { return v != 0; }));
}

std::size_t HeadMask::col_sum(std::size_t k) const {
    std::size_t sum = 0;
    for (std::size_t q = 0; q < rows_; ++q) sum += at(q, k) != 0;
    return sum;
}

std::size_t HeadMask::support() const {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](std::uint8_t v) { return v != 0; }));
}

std::string HeadMask::row_string(std::size_t q) const {
    std::string s(cols_, '0');
    for (std::size_t k = 0; k < cols_; ++k) {
        if (at(q, k) != 0) s[k] = '1';
    }
    return s;
}

std::vector<MaskDiagnostic> validate_mask(const SelectiveMask& mask) {
    std::vector<MaskDiagnostic> out;
    const std::size_t n = mask.seq_len;
    if (n == 0) out.push_back({std::nullopt, std::nullopt, "seq_len must be positive"});
    if (mask.n_heads == 0) out.push_back({std::nullopt, std::nullopt, "n_heads must be positive"});
    if (mask.heads.size() != mask.n_heads) {
        out.push_back({std::nullopt, std::nullopt,
                       "n_heads is " + std::to_string(mask.n_heads) + " but " +
                           std::to_string(mask.heads.size()) + " heads present"});
    }
    if (mask.k_per_query && (*mask.k_per_query < 1 || *mask.k_per_query > n)) {
        out.push_back({std::nullopt, std::nullopt,
                       "k_per_query " + std::to_string(*mask.k_per_query) + " outside [1, seq_len]"});
    }
    for (std::size_t h = 0; h < mask.heads.size(); ++h) {
        const HeadMask& head = mask.heads[h];
        if (head.rows() != n || head.cols() != n) {
            out.push_back({h, std::nullopt,
                           "head is " + std::to_string(head.rows()) + "x" + std::to_string(head.cols()) +
                               ", expected " + std::to_string(n) + "x" + std::to_string(n)});
            continue;
        }
        for (std::size_t q = 0; q < n; ++q) {
            const auto r = head.row(q);
            if (std::any_of(r.begin(), r.end(), [](std::uint8_t v) { return v > 1; })) {
                out.push_back({h, q, "entry outside {0,1}"});
                continue;
            }
            if (mask.k_per_query && head.row_sum(q) != *mask.k_per_query) {
                out.push_back({h, q,
                               "row sum " + std::to_string(head.row_sum(q)) + " != k_per_query " +
                                   std::to_string(*mask.k_per_query)});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Locality Locality::parse(const std::string& text) {
    if (text == "uniform") return uniform();
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("unknown locality '" + text + "'");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc{} || ptr != arg.data() + arg.size() || value == 0) {
        throw InvalidArgument("locality parameter must be a positive integer: '" + text + "'");
    }
    if (kind == "block") return block(value);
    if (kind == "banded") return banded(value);
    throw InvalidArgument("unknown locality '" + text + "'");
}

std::string Locality::to_string() const {
    switch (kind) {
        case LocalityKind::uniform: return "uniform";
        case LocalityKind::block: return "block:" + std::to_string(param);
        case LocalityKind::banded: return "banded:" + std::to_string(param);
    }
    return "uniform";
}

namespace {

const std::array<WorkloadPreset, 4> kPresets{{
    {"ttst", 30, 15},
    {"kvt-tiny", 198, 50},
    {"kvt-base", 198, 64},
    {"drsformer", 48, 12},
}};

// Partial Fisher-Yates: moves `count` uniformly drawn elements to the front.
void draw_front(std::vector<std::size_t>& pool, std::size_t count, SplitMix64& rng) {
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
}

std::pair<std::size_t, std::size_t> preferred_range(const Locality& loc, std::size_t q, std::size_t n) {
    switch (loc.kind) {
        case LocalityKind::uniform: return {0, n};
        case LocalityKind::block: {
            const std::size_t b = std::min(loc.param, n);
            std::size_t j = 0;
            while (j + 1 < b && (j + 1) * n / b <= q) ++j;
            return {j * n / b, (j + 1) * n / b};
        }
        case LocalityKind::banded: {
            const std::size_t w = std::min(loc.param, n);
            const std::size_t half = w / 2;
            const std::size_t lo = std::min(q > half ? q - half : 0, n - w);
            return {lo, lo + w};
        }
    }
    return {0, n};
}

void fill_row(HeadMask& head, std::size_t q, std::size_t k, const GeneratorSpec& spec, SplitMix64& rng) {
    const std::size_t n = head.cols();
    const auto [lo, hi] = preferred_range(spec.locality, q, n);

    std::vector<std::size_t> preferred;
    std::vector<std::size_t> others;
    for (std::size_t c = 0; c < n; ++c) (c >= lo && c < hi ? preferred : others).push_back(c);

    if (preferred.size() >= k) {
        draw_front(preferred, k, rng);
        for (std::size_t i = 0; i < k; ++i) head.set(q, preferred[i]);
    } else {
        for (std::size_t c : preferred) head.set(q, c);
        const std::size_t rest = k - preferred.size();
        draw_front(others, rest, rng);
        for (std::size_t i = 0; i < rest; ++i) head.set(q, others[i]);
    }

    const auto moved = std::min(static_cast<std::size_t>(std::floor(spec.noise * static_cast<double>(k))), n - k);
    if (moved == 0) return;
    std::vector<std::size_t> selected;
    std::vector<std::size_t> vacant;
    for (std::size_t c = 0; c < n; ++c) (head.selected(q, c) ? selected : vacant).push_back(c);
    draw_front(selected, moved, rng);
    for (std::size_t i = 0; i < moved; ++i) head.set(q, selected[i], 0);
    draw_front(vacant, moved, rng);
    for (std::size_t i = 0; i < moved; ++i) head.set(q, vacant[i], 1);
}

}  // namespace

std::span<const WorkloadPreset> workload_presets() { return kPresets; }

const WorkloadPreset& find_preset(const std::string& name) {
    for (const auto& p : kPresets) {
        if (p.name == name) return p;
    }
    throw InvalidArgument("unknown preset '" + name + "'");
}

SelectiveMask generate_mask(const GeneratorSpec& spec_in) {
    GeneratorSpec spec = spec_in;
    if (spec.preset) {
        const auto& p = find_preset(*spec.preset);
        spec.seq_len = p.seq_len;
        spec.k_per_query = p.k_per_query;
    }
    const std::size_t n = spec.seq_len;
    const std::size_t k = spec.k_per_query;
    if (n == 0) throw InvalidArgument("seq_len must be positive");
    if (spec.n_heads == 0) throw InvalidArgument("n_heads must be positive");
    if (k == 0) throw InvalidArgument("k_per_query must be positive");
    if (k > n) throw InvalidArgument("K exceeds N");
    if (!(spec.noise >= 0.0 && spec.noise <= 1.0)) throw InvalidArgument("noise must lie in [0, 1]");
    if (spec.locality.kind != LocalityKind::uniform && spec.locality.param == 0) {
        throw InvalidArgument("locality parameter must be positive");
    }

    SelectiveMask mask;
    mask.seq_len = n;
    mask.n_heads = spec.n_heads;
    mask.k_per_query = k;
    mask.heads.reserve(spec.n_heads);

    SplitMix64 rng(spec.seed);
    for (std::size_t h = 0; h < spec.n_heads; ++h) {
        HeadMask head(n);
        for (std::size_t q = 0; q < n; ++q) fill_row(head, q, k, spec, rng);
        mask.heads.push_back(std::move(head));
    }
    return mask;
}

}  // namespace sata
