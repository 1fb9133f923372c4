#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sata/mask.hpp"
#include "sata/scheduler.hpp"
#include "sata/sorter.hpp"

// Brute-force references for the test suite and the `verify` CLI verb. Nothing
// here calls the incremental sorter or the schedule expansion it checks.
namespace sata::oracle {

enum class ViolationKind { missing_pair, duplicate_pair, illegal_exclusion, load_order, class_error };

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::size_t head = 0;     ///< head index (or subhead index for load/class errors)
    std::size_t query = 0;
    std::size_t key = 0;
    std::string message;
};

using ViolationList = std::vector<Violation>;

/// Greedy sort recomputed from scratch each step: Dummy is materialized as the
/// column-sum of the sorted keys and every distance is a fresh dot product.
std::vector<std::size_t> replay_sort(const HeadMask& mask, SeedPolicy seed = {});

/// Dummy vector (per-query counts) after sorting the given keys.
std::vector<std::int64_t> materialize_dummy(const HeadMask& mask, const std::vector<std::size_t>& sorted_keys);

/// Checks that the schedule MACs every selected pair exactly once, excludes
/// only pairs it may legally exclude, loads each query before it is used and
/// retires it after, and that every subhead's classification is consistent
/// with its mask, key order and s_h.
ViolationList validate_schedule(const Schedule& schedule, const SelectiveMask& mask);

/// MAC count of a local subhead by walking phases and their active sets.
/// Throws InvalidArgument for a GLOB outcome.
std::size_t count_pairs_enumerated(const SortOutcome& outcome);

/// Closed form n_q * n_k - s_h * (a + b).
std::size_t closed_form_pairs(const SortOutcome& outcome);

}  // namespace sata::oracle
