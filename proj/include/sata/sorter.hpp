#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sata/mask.hpp"

namespace sata {

/// Class of a query relative to the sorted key order and heavy size S_h.
///   HEAD: selects none of the last S_h sorted keys.
///   TAIL: selects none of the first S_h sorted keys.
///   GLOB: selects keys at both ends.
enum class QClass : std::uint8_t { head, tail, glob };

/// Dominant query class of a head; `glob` heads fall back to load-then-MAC.
enum class HeadType : std::uint8_t { head, tail, glob };

std::string_view to_string(QClass c);
std::string_view to_string(HeadType t);
QClass parse_qclass(std::string_view s);
HeadType parse_head_type(std::string_view s);

/// How the first key of the greedy sort is picked.
struct SeedPolicy {
    enum class Kind { fixed, random } kind = Kind::fixed;
    /// Key index for `fixed` (clamped into range), RNG seed for `random`.
    std::uint64_t value = 0;

    static SeedPolicy fixed(std::size_t key = 0) { return {Kind::fixed, key}; }
    static SeedPolicy random(std::uint64_t seed) { return {Kind::random, seed}; }

    /// First sorted key for a head with `n_keys` columns.
    std::size_t pick(std::size_t n_keys) const;
};

/// Binary dot product between a materialized Dummy vector and a mask column.
/// Throws InvalidArgument on a length mismatch.
std::int64_t direct_distance(std::span<const std::int64_t> dummy, std::span<const std::uint8_t> column);

/// Column-packed copy of a head mask: each key column is a bitset over queries,
/// so the column dot product is a popcount of an AND.
class ColumnBits {
public:
    explicit ColumnBits(const HeadMask& mask);

    std::size_t n_keys() const { return n_keys_; }
    std::size_t n_queries() const { return n_queries_; }
    std::int64_t dot(std::size_t a, std::size_t b) const;

private:
    std::size_t n_queries_;
    std::size_t n_keys_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

/// Incremental similarity scores: psums[i] == Dummy . column(i) for every
/// unsorted key i, where Dummy is the element-wise sum of the sorted columns.
struct PsumState {
    std::vector<std::int64_t> psums;
    std::vector<std::uint8_t> sorted;
    std::vector<std::size_t> order;

    explicit PsumState(std::size_t n_keys) : psums(n_keys, 0), sorted(n_keys, 0) {}
};

/// Marks `just_sorted` as sorted and adds column(i) . column(just_sorted) to
/// every unsorted psum. Throws InvalidArgument if the key is already sorted.
void update_psums(PsumState& state, std::size_t just_sorted, const ColumnBits& columns);
void update_psums(PsumState& state, std::size_t just_sorted, const HeadMask& mask);

struct SortTrace {
    std::vector<std::size_t> key_order;
    /// scores[t][i]: psum of key i when position t+1 was chosen; -1 for keys
    /// already sorted at that point.
    std::vector<std::vector<std::int64_t>> scores;
};

/// Greedy key sort: seed key first, then repeatedly the unsorted key with the
/// largest psum (lowest index on ties).
SortTrace sort_keys(const HeadMask& mask, SeedPolicy seed = {});

/// Classifies every query of `mask` against the S_h windows at both ends of
/// `key_order`. A query qualifying as both HEAD and TAIL is tagged HEAD.
std::vector<QClass> classify_queries(const HeadMask& mask, std::span<const std::size_t> key_order, std::size_t s_h);

struct ClassCounts {
    std::size_t head = 0;
    std::size_t tail = 0;
    std::size_t glob = 0;

    friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

ClassCounts count_classes(std::span<const QClass> classes);

struct SortOutcome {
    std::vector<std::size_t> key_order;
    std::vector<QClass> q_class;
    HeadType head_type = HeadType::head;
    std::size_t s_h = 0;
    std::size_t s_h_init = 0;
    std::size_t decrements = 0;
    ClassCounts counts;
    /// Classification at each S_h tried, starting from s_h_init.
    std::vector<std::vector<QClass>> class_trace;

    std::size_t n_keys() const { return key_order.size(); }
    std::size_t n_queries() const { return q_class.size(); }
    bool local() const { return head_type != HeadType::glob; }
};

struct ResolveParams {
    double theta = 0.0;
    std::size_t s_h_init = 0;
    std::size_t s_h_min = 1;
    SeedPolicy seed;
};

/// Sorts keys once, then shrinks S_h from s_h_init until at most `theta`
/// queries are GLOB. A head still above theta at s_h_min is typed GLOB.
/// Requires s_h_min <= s_h_init <= floor(n_keys/2) and theta >= 0.
SortOutcome resolve_head(const HeadMask& mask, const ResolveParams& params);

}  // namespace sata
