#include "sata/sorter.hpp"

#include <bit>

#include "sata/error.hpp"
#include "sata/rng.hpp"

namespace sata {

std::string_view to_string(QClass c) {
    switch (c) {
        case QClass::head: return "HEAD";
        case QClass::tail: return "TAIL";
        case QClass::glob: return "GLOB";
    }
    return "GLOB";
}

std::string_view to_string(HeadType t) {
    switch (t) {
        case HeadType::head: return "HEAD";
        case HeadType::tail: return "TAIL";
        case HeadType::glob: return "GLOB";
    }
    return "GLOB";
}

QClass parse_qclass(std::string_view s) {
    if (s == "HEAD") return QClass::head;
    if (s == "TAIL") return QClass::tail;
    if (s == "GLOB") return QClass::glob;
    throw ParseError("unknown query class '" + std::string(s) + "'");
}

HeadType parse_head_type(std::string_view s) {
    if (s == "HEAD") return HeadType::head;
    if (s == "TAIL") return HeadType::tail;
    if (s == "GLOB") return HeadType::glob;
    throw ParseError("unknown head type '" + std::string(s) + "'");
}

std::size_t SeedPolicy::pick(std::size_t n_keys) const {
    if (n_keys == 0) throw InvalidArgument("empty mask dimension");
    if (kind == Kind::fixed) return static_cast<std::size_t>(std::min<std::uint64_t>(value, n_keys - 1));
    SplitMix64 rng(value);
    return static_cast<std::size_t>(rng.below(n_keys));
}

std::int64_t direct_distance(std::span<const std::int64_t> dummy, std::span<const std::uint8_t> column) {
    if (dummy.size() != column.size()) throw InvalidArgument("direct_distance: length mismatch");
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < dummy.size(); ++i) sum += dummy[i] * static_cast<std::int64_t>(column[i]);
    return sum;
}

ColumnBits::ColumnBits(const HeadMask& mask)
    : n_queries_(mask.rows()), n_keys_(mask.cols()), words_((mask.rows() + 63) / 64), bits_(words_ * n_keys_, 0) {
    for (std::size_t q = 0; q < n_queries_; ++q) {
        for (std::size_t k = 0; k < n_keys_; ++k) {
            if (mask.selected(q, k)) bits_[k * words_ + q / 64] |= std::uint64_t{1} << (q % 64);
        }
    }
}

std::int64_t ColumnBits::dot(std::size_t a, std::size_t b) const {
    const std::uint64_t* wa = bits_.data() + a * words_;
    const std::uint64_t* wb = bits_.data() + b * words_;
    std::int64_t sum = 0;
    for (std::size_t w = 0; w < words_; ++w) sum += std::popcount(wa[w] & wb[w]);
    return sum;
}

void update_psums(PsumState& state, std::size_t just_sorted, const ColumnBits& columns) {
    if (just_sorted >= state.sorted.size()) throw InvalidArgument("update_psums: key out of range");
    if (state.sorted[just_sorted]) {
        throw InvalidArgument("update_psums: key " + std::to_string(just_sorted) + " already sorted");
    }
    state.sorted[just_sorted] = 1;
    state.order.push_back(just_sorted);
    for (std::size_t i = 0; i < state.psums.size(); ++i) {
        if (!state.sorted[i]) state.psums[i] += columns.dot(i, just_sorted);
    }
}

void update_psums(PsumState& state, std::size_t just_sorted, const HeadMask& mask) {
    update_psums(state, just_sorted, ColumnBits(mask));
}

SortTrace sort_keys(const HeadMask& mask, SeedPolicy seed) {
    const std::size_t n = mask.cols();
    if (n == 0 || mask.rows() == 0) throw InvalidArgument("sort_keys: empty mask dimension");

    const ColumnBits columns(mask);
    PsumState state(n);
    SortTrace trace;
    trace.scores.reserve(n - 1);

    update_psums(state, seed.pick(n), columns);
    while (state.order.size() < n) {
        std::vector<std::int64_t> snapshot(n, -1);
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (state.sorted[i]) continue;
            snapshot[i] = state.psums[i];
            if (best == n || state.psums[i] > state.psums[best]) best = i;
        }
        trace.scores.push_back(std::move(snapshot));
        update_psums(state, best, columns);
    }
    trace.key_order = std::move(state.order);
    return trace;
}

std::vector<QClass> classify_queries(const HeadMask& mask, std::span<const std::size_t> key_order, std::size_t s_h) {
    const std::size_t n = mask.cols();
    if (key_order.size() != n) throw InvalidArgument("classify_queries: key order length mismatch");
    if (s_h > n / 2) throw InvalidArgument("classify_queries: s_h exceeds half the key count");

    std::vector<QClass> out(mask.rows(), QClass::glob);
    for (std::size_t q = 0; q < mask.rows(); ++q) {
        bool touches_first = false;
        bool touches_last = false;
        for (std::size_t p = 0; p < s_h; ++p) {
            touches_first = touches_first || mask.selected(q, key_order[p]);
            touches_last = touches_last || mask.selected(q, key_order[n - 1 - p]);
        }
        if (!touches_last) {
            out[q] = QClass::head;
        } else if (!touches_first) {
            out[q] = QClass::tail;
        }
    }
    return out;
}

ClassCounts count_classes(std::span<const QClass> classes) {
    ClassCounts c;
    for (QClass q : classes) {
        switch (q) {
            case QClass::head: ++c.head; break;
            case QClass::tail: ++c.tail; break;
            case QClass::glob: ++c.glob; break;
        }
    }
    return c;
}

SortOutcome resolve_head(const HeadMask& mask, const ResolveParams& params) {
    const std::size_t n = mask.cols();
    if (params.theta < 0.0) throw InvalidArgument("resolve_head: theta must be non-negative");
    if (params.s_h_init > n / 2) throw InvalidArgument("resolve_head: s_h_init exceeds half the key count");
    if (params.s_h_min > params.s_h_init) throw InvalidArgument("resolve_head: s_h_min exceeds s_h_init");

    SortOutcome out;
    out.key_order = sort_keys(mask, params.seed).key_order;
    out.s_h_init = params.s_h_init;

    std::size_t s_h = params.s_h_init;
    for (;;) {
        auto classes = classify_queries(mask, out.key_order, s_h);
        const ClassCounts counts = count_classes(classes);
        out.class_trace.push_back(classes);
        out.q_class = std::move(classes);
        out.counts = counts;
        if (static_cast<double>(counts.glob) <= params.theta) {
            out.head_type = counts.head >= counts.tail ? HeadType::head : HeadType::tail;
            break;
        }
        if (s_h == params.s_h_min) {
            out.head_type = HeadType::glob;
            break;
        }
        --s_h;
    }
    out.s_h = s_h;
    out.decrements = params.s_h_init - s_h;
    return out;
}

}  // namespace sata
