#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sata/mask.hpp"
#include "sata/scheduler.hpp"

namespace sata {

/// How the K-read and Q-write streams of a step combine.
///   overlap_max: the streams run concurrently; each stage costs the longer one.
///   paper_min:   each stage costs the shorter one (fidelity mode).
enum class CombineMode { overlap_max, paper_min };

std::string_view to_string(CombineMode m);
CombineMode parse_combine_mode(std::string_view s);

/// Latency and energy constants. Defaults are unit values; calibrated numbers
/// come from a cost config file.
struct CostParams {
    double t_rd_dt = 1.0;    ///< per K read: data transfer
    double t_wr_arr = 1.0;   ///< per Q write: into the array
    double t_rd_comp = 1.0;  ///< per K read: compute
    double t_wr_dt = 1.0;    ///< per Q write: data transfer
    double d_k = 1.0;        ///< elements per Q/K vector
    double e_mac_elem = 1.0;
    double e_load_elem = 1.0;
    CombineMode combine_mode = CombineMode::overlap_max;
    bool glob_energy_gated = false;
    double sched_cycles_per_key = 1.0;
    double sched_energy_per_round = 1.0;
};

/// Throws InvalidArgument if a constant is negative or d_k < 1.
void check_params(const CostParams& p);

/// Cost config file: a flat JSON object whose keys mirror CostParams; missing
/// keys keep their defaults, unknown keys are rejected.
CostParams cost_params_from_json(const std::string& text);
std::string cost_params_to_json(const CostParams& p);
CostParams load_cost_params(const std::filesystem::path& path);

/// Latency of a step that MACs `x` keys and loads `y` queries. When only one
/// stream is present it pays its full serial cost in either mode. Throws
/// InvalidArgument when x == y == 0.
double step_latency(std::size_t x, std::size_t y, const CostParams& p);

struct LatencyEnergy {
    double latency = 0.0;
    double energy = 0.0;
};

/// Conventional load-all-then-MAC-all flow over `n_heads` n x n heads.
LatencyEnergy baseline_dense(std::size_t n, std::size_t n_heads, const CostParams& p);

/// Same latency as dense; MAC energy only for selected pairs.
LatencyEnergy baseline_pruned(const SelectiveMask& mask, const CostParams& p);

/// Dense and pruned baselines over the same tiling the schedule used (every
/// tile at full size, no zero-skip). With s_f = N these equal baseline_dense /
/// baseline_pruned.
LatencyEnergy baseline_dense_tiled(const SelectiveMask& mask, std::size_t s_f, const CostParams& p);
LatencyEnergy baseline_pruned_tiled(const SelectiveMask& mask, std::size_t s_f, const CostParams& p);

struct SchedulerOverhead {
    double latency = 0.0;
    double energy = 0.0;
    bool hidden = true;
    /// Part of `latency` not covered by the overlapped compute.
    double exposed = 0.0;
};

/// One sorting round per key; hidden when it fits under `compute_latency`.
SchedulerOverhead scheduler_overhead(std::size_t n_sub, double compute_latency, const CostParams& p);

struct SimReport {
    double scheduled_latency = 0.0;
    double dense_latency = 0.0;
    double pruned_latency = 0.0;
    double scheduled_energy = 0.0;
    double dense_energy = 0.0;
    double pruned_energy = 0.0;

    double throughput_gain_dense = 0.0;
    double throughput_gain_pruned = 0.0;
    double energy_gain_dense = 0.0;
    double energy_gain_pruned = 0.0;
    double utilization = 0.0;

    /// Sum of step latencies, excluding exposed scheduler overhead.
    double compute_latency = 0.0;
    double mac_energy = 0.0;
    double load_energy = 0.0;
    /// MAC'd (query, key) pairs the energy model charged for.
    double mac_pairs = 0.0;

    double sched_overhead_latency = 0.0;
    double sched_overhead_energy = 0.0;
    double sched_overhead_exposed = 0.0;
    std::vector<SchedulerOverhead> overhead_per_subhead;

    std::vector<double> step_latencies;
    /// Queries resident in the array during each step (after its loads).
    std::vector<std::size_t> occupancy_trace;
};

/// Evaluates a schedule. `mask` must be the mask the schedule was planned
/// from (used for gated GLOB energy and the baselines); throws
/// ValidationError on a dimension mismatch.
SimReport simulate(const Schedule& schedule, const SelectiveMask& mask, const CostParams& p);

}  // namespace sata
