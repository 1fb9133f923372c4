#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sata/mask.hpp"
#include "sata/sorter.hpp"

namespace sata {

// ---------------------------------------------------------------------------
// Tiling and zero-skip

struct TileSpec {
    std::size_t s_f = 0;
    bool zero_skip = false;
};

/// One s_f x s_f block of a head mask (ragged at the right/bottom edges).
/// `rows`/`cols` map tile indices back to head indices.
struct Tile {
    std::size_t q_fold = 0;
    std::size_t k_fold = 0;
    HeadMask mask;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
};

/// Partitions a head into ceil(rows/s_f) x ceil(cols/s_f) tiles ordered
/// K-fold-major: all Q-folds of K-fold 0, then K-fold 1, and so on.
std::vector<Tile> tile_mask(const HeadMask& head, const TileSpec& spec);

/// Result of removing all-zero rows (queries) and columns (keys). Indices in
/// `kept_*`/`skipped_*` are relative to the input mask.
struct SkipResult {
    HeadMask reduced;
    std::vector<std::size_t> kept_rows;
    std::vector<std::size_t> kept_cols;
    std::vector<std::size_t> skipped_rows;
    std::vector<std::size_t> skipped_cols;
};

SkipResult zero_skip(const HeadMask& tile);

// ---------------------------------------------------------------------------
// Schedule

/// A tile (or whole head) that is sorted and scheduled independently.
/// `mask` is the post-skip matrix; `rows`/`cols` map its indices to the head.
struct Subhead {
    std::size_t head = 0;
    std::size_t q_fold = 0;
    std::size_t k_fold = 0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    std::vector<std::size_t> skipped_rows;
    std::vector<std::size_t> skipped_cols;
    HeadMask mask;
    SortOutcome outcome;

    std::size_t n_queries() const { return rows.size(); }
    std::size_t n_keys() const { return cols.size(); }
};

enum class Phase { init, mac_first, mac_mid, mac_last, wrap_load, wrap_mac };

/// Which queries a step's keys are MAC'd against.
///   major:       HEAD+GLOB (HEAD-type head) or TAIL+GLOB (TAIL-type head)
///   all:         every query of the subhead
///   minor_glob:  the opposite class plus GLOB
///   all_present: every query of a GLOB subhead
///   none:        the step performs no MACs
enum class ActiveKind { none, major, all, minor_glob, all_present };

std::string_view to_string(Phase p);
std::string_view to_string(ActiveKind a);
Phase parse_phase(std::string_view s);
ActiveKind parse_active_kind(std::string_view s);

struct KeyMac {
    std::size_t pos = 0;   ///< sorted position within the subhead
    std::size_t orig = 0;  ///< key index in the head

    friend bool operator==(const KeyMac&, const KeyMac&) = default;
};

/// One time step: a batch of query loads overlapped with a batch of key MACs.
/// `head` indexes Schedule::subheads and owns k_macs/active/retired;
/// `load_head` owns q_loads (differs from `head` when the next subhead's major
/// queries are loaded under the current one's last keys). Query indices are
/// head-level.
struct ScheduleStep {
    Phase phase = Phase::init;
    std::size_t head = 0;
    std::size_t load_head = 0;
    std::vector<std::size_t> q_loads;
    std::vector<KeyMac> k_macs;
    ActiveKind active_kind = ActiveKind::none;
    std::vector<std::size_t> active;
    std::vector<std::size_t> retired;

    friend bool operator==(const ScheduleStep&, const ScheduleStep&) = default;
};

struct Schedule {
    std::size_t seq_len = 0;
    std::size_t n_heads = 0;
    TileSpec tile;
    std::vector<Subhead> subheads;
    std::vector<ScheduleStep> steps;
};

/// Queries loaded before a subhead's first MAC (type-aligned class + GLOB).
/// Indices are local to the outcome.
std::vector<std::size_t> major_queries(const SortOutcome& outcome);
/// Queries loaded during the first MAC phase (opposite class).
std::vector<std::size_t> minor_queries(const SortOutcome& outcome);

/// MAC_FIRST / MAC_MID / MAC_LAST for one local subhead, in local indices.
/// MAC_FIRST carries the minor loads; MAC_MID is omitted when it has no keys;
/// MAC_FIRST and MAC_LAST are always emitted and may be key-less when s_h = 0.
/// TAIL-type heads walk the sorted keys from the end. Throws InvalidArgument
/// for a GLOB outcome.
std::vector<ScheduleStep> schedule_head(const SortOutcome& outcome);

/// Pipelines the local subheads in `order` (INIT, then each subhead's phases
/// with the next subhead's major loads overlapped onto MAC_LAST), then appends
/// WRAP_LOAD/WRAP_MAC for each GLOB subhead. Steps with neither loads nor MACs
/// are folded into the preceding step.
Schedule schedule_layer(std::vector<Subhead> subheads, std::span<const std::size_t> order);
/// Same, in the natural subhead order.
Schedule schedule_layer(std::vector<Subhead> subheads);

struct MacPair {
    std::size_t subhead = 0;
    std::size_t query = 0;
    std::size_t key = 0;

    friend auto operator<=>(const MacPair&, const MacPair&) = default;
};

/// Every (subhead, query, key) MAC the schedule performs, sorted, with
/// multiplicity.
std::vector<MacPair> mac_pair_set(const Schedule& schedule);

// ---------------------------------------------------------------------------
// sata-sched file format

std::string schedule_to_json(const Schedule& schedule);
/// Parses a schedule and rebuilds each subhead's mask from `mask`. Throws
/// ParseError for format violations and ValidationError when the schedule
/// does not fit the mask's dimensions.
Schedule schedule_from_json(const std::string& text, const SelectiveMask& mask);

void save_schedule(const Schedule& schedule, const std::filesystem::path& path);
Schedule load_schedule(const std::filesystem::path& path, const SelectiveMask& mask);

/// Extracts a subhead's post-skip matrix from the full head mask.
HeadMask extract_submask(const HeadMask& head, std::span<const std::size_t> rows, std::span<const std::size_t> cols);

}  // namespace sata
