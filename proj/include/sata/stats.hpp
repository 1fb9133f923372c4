#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sata/cost_model.hpp"
#include "sata/scheduler.hpp"

namespace sata {

/// Post-schedule summary of one workload. Fractions are in [0, 1].
struct StatsRow {
    std::string label;
    std::size_t n = 0;
    std::size_t n_heads = 0;
    std::size_t k = 0;  ///< 0 when the mask has no fixed K
    std::size_t s_f = 0;
    double glob_q_fraction = 0.0;
    double glob_head_fraction = 0.0;
    double avg_s_h_fraction = 0.0;
    double avg_s_h_decrements = 0.0;
    double mac_reduction_fraction = 0.0;
    double throughput_gain_dense = 0.0;
    double throughput_gain_pruned = 0.0;
    double energy_gain_dense = 0.0;
    double energy_gain_pruned = 0.0;
    double sched_overhead_fraction = 0.0;
    double utilization = 0.0;
};

/// Column names in CSV order.
std::span<const char* const> stats_columns();

StatsRow collect_stats(const std::string& label, const SelectiveMask& mask, const Schedule& schedule,
                       const SimReport& report);

enum class ReportFormat { csv, json };

std::string rows_to_csv(std::span<const StatsRow> rows);
std::string rows_to_json(std::span<const StatsRow> rows);
std::vector<StatsRow> rows_from_csv(const std::string& text);
std::vector<StatsRow> rows_from_json(const std::string& text);

/// Writes rows with 6-decimal fixed formatting. Throws InvalidArgument for an
/// empty row list and IoError on write failure.
void emit_report(std::span<const StatsRow> rows, ReportFormat format, const std::filesystem::path& path);
/// Reads a CSV or JSON report (chosen by the .json extension). Throws
/// ParseError naming the file on a schema or version mismatch.
std::vector<StatsRow> read_report(const std::filesystem::path& path);

}  // namespace sata
