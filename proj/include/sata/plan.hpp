#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sata/mask.hpp"
#include "sata/scheduler.hpp"
#include "sata/sorter.hpp"

namespace sata {

/// Knobs for turning a mask into a schedule. Fractions are relative to each
/// subhead: theta = theta_fraction * queries, s_h_init = floor(s_h_init_fraction * keys).
struct PlanConfig {
    double theta_fraction = 0.5;
    double s_h_init_fraction = 0.5;
    std::size_t s_h_min = 1;
    /// Tile edge; unset means one tile per head.
    std::optional<std::size_t> tile;
    bool zero_skip = false;
    SeedPolicy seed;
};

/// Throws InvalidArgument unless both fractions lie in (0, 0.5], the tile is
/// positive, and s_h_min fits the initial heavy size of a full-size tile.
void check_config(const PlanConfig& config, std::size_t seq_len);

/// Resolve parameters for one (post-skip) subhead mask. s_h_min is clamped to
/// s_h_init on small ragged tiles.
ResolveParams resolve_params_for(const HeadMask& sub, const PlanConfig& config, std::size_t subhead_index);

enum class Execution { serial, parallel };

/// Tiles, zero-skips and resolves every head of the mask. Output order is
/// head-major, then tile order; fully zero tiles are dropped. `parallel`
/// distributes subheads over OpenMP threads and returns exactly what `serial`
/// returns.
std::vector<Subhead> build_subheads(const SelectiveMask& mask, const PlanConfig& config,
                                    Execution exec = Execution::parallel);

/// build_subheads followed by schedule_layer.
Schedule plan_layer(const SelectiveMask& mask, const PlanConfig& config, Execution exec = Execution::parallel);

}  // namespace sata
