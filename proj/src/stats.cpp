#include "sata/stats.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sata/error.hpp"

namespace sata {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<const char*, 16> kColumns{
    "label",
    "n",
    "n_heads",
    "k",
    "s_f",
    "glob_q_fraction",
    "glob_head_fraction",
    "avg_s_h_fraction",
    "avg_s_h_decrements",
    "mac_reduction_fraction",
    "throughput_gain_dense",
    "throughput_gain_pruned",
    "energy_gain_dense",
    "energy_gain_pruned",
    "sched_overhead_fraction",
    "utilization",
};

struct RealField {
    const char* name;
    double StatsRow::*member;
};

struct CountField {
    const char* name;
    std::size_t StatsRow::*member;
};

constexpr std::array<CountField, 4> kCounts{{
    {"n", &StatsRow::n},
    {"n_heads", &StatsRow::n_heads},
    {"k", &StatsRow::k},
    {"s_f", &StatsRow::s_f},
}};

constexpr std::array<RealField, 11> kReals{{
    {"glob_q_fraction", &StatsRow::glob_q_fraction},
    {"glob_head_fraction", &StatsRow::glob_head_fraction},
    {"avg_s_h_fraction", &StatsRow::avg_s_h_fraction},
    {"avg_s_h_decrements", &StatsRow::avg_s_h_decrements},
    {"mac_reduction_fraction", &StatsRow::mac_reduction_fraction},
    {"throughput_gain_dense", &StatsRow::throughput_gain_dense},
    {"throughput_gain_pruned", &StatsRow::throughput_gain_pruned},
    {"energy_gain_dense", &StatsRow::energy_gain_dense},
    {"energy_gain_pruned", &StatsRow::energy_gain_pruned},
    {"sched_overhead_fraction", &StatsRow::sched_overhead_fraction},
    {"utilization", &StatsRow::utilization},
}};

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

double parse_real(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ParseError(what);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("not a number in column '" + what + "': '" + s + "'");
    }
}

double mean_or_zero(double sum, std::size_t count) { return count == 0 ? 0.0 : sum / static_cast<double>(count); }

}  // namespace

std::span<const char* const> stats_columns() { return kColumns; }

StatsRow collect_stats(const std::string& label, const SelectiveMask& mask, const Schedule& schedule,
                       const SimReport& report) {
    StatsRow row;
    row.label = label;
    row.n = mask.seq_len;
    row.n_heads = mask.n_heads;
    row.k = mask.k_per_query.value_or(0);
    row.s_f = schedule.tile.s_f == 0 ? mask.seq_len : schedule.tile.s_f;

    std::size_t glob_queries = 0;
    std::size_t all_queries = 0;
    std::size_t glob_heads = 0;
    std::size_t local_heads = 0;
    double s_h_fraction_sum = 0.0;
    double decrement_sum = 0.0;
    for (const auto& sub : schedule.subheads) {
        const auto& o = sub.outcome;
        glob_queries += o.counts.glob;
        all_queries += o.n_queries();
        decrement_sum += static_cast<double>(o.decrements);
        if (o.local()) {
            ++local_heads;
            s_h_fraction_sum += static_cast<double>(o.s_h) / static_cast<double>(o.n_keys());
        } else {
            ++glob_heads;
        }
    }
    row.glob_q_fraction = mean_or_zero(static_cast<double>(glob_queries), all_queries);
    row.glob_head_fraction = mean_or_zero(static_cast<double>(glob_heads), schedule.subheads.size());
    row.avg_s_h_fraction = mean_or_zero(s_h_fraction_sum, local_heads);
    row.avg_s_h_decrements = mean_or_zero(decrement_sum, schedule.subheads.size());

    const double dense_pairs = static_cast<double>(mask.seq_len * mask.seq_len * mask.n_heads);
    row.mac_reduction_fraction = 1.0 - static_cast<double>(mac_pair_set(schedule).size()) / dense_pairs;

    row.throughput_gain_dense = report.throughput_gain_dense;
    row.throughput_gain_pruned = report.throughput_gain_pruned;
    row.energy_gain_dense = report.energy_gain_dense;
    row.energy_gain_pruned = report.energy_gain_pruned;
    const double total = report.compute_latency + report.sched_overhead_latency;
    row.sched_overhead_fraction = total > 0.0 ? report.sched_overhead_latency / total : 0.0;
    row.utilization = report.utilization;
    return row;
}

std::string rows_to_csv(std::span<const StatsRow> rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kColumns.size(); ++i) out << (i ? "," : "") << kColumns[i];
    out << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.label);
        for (const auto& f : kCounts) out << ',' << r.*f.member;
        for (const auto& f : kReals) out << ',' << fixed6(r.*f.member);
        out << '\n';
    }
    return out.str();
}

std::string rows_to_json(std::span<const StatsRow> rows) {
    // Reals are emitted as 6-decimal literals so the file is byte-stable.
    std::ostringstream out;
    out << "{\n  \"format\": \"sata-report\",\n  \"version\": 1,\n  \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << (i ? "," : "") << "\n    {\"label\": " << ordered_json(r.label).dump();
        for (const auto& f : kCounts) out << ", \"" << f.name << "\": " << r.*f.member;
        for (const auto& f : kReals) {
            const double v = r.*f.member;
            out << ", \"" << f.name << "\": " << (std::isfinite(v) ? fixed6(v) : "null");
        }
        out << "}";
    }
    out << "\n  ]\n}\n";
    return out.str();
}

std::vector<StatsRow> rows_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty report");
    const auto header = split_csv_line(line);
    if (header.size() != kColumns.size()) throw ParseError("report header has unexpected columns");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] != kColumns[i]) throw ParseError("report column " + std::to_string(i) + " is '" + header[i] + "'");
    }
    std::vector<StatsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != kColumns.size()) throw ParseError("report row " + std::to_string(rows.size()) + ": wrong field count");
        StatsRow r;
        r.label = f[0];
        std::size_t col = 1;
        for (const auto& c : kCounts) r.*c.member = static_cast<std::size_t>(parse_real(f[col++], c.name));
        for (const auto& c : kReals) r.*c.member = parse_real(f[col++], c.name);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<StatsRow> rows_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != "sata-report") throw ParseError("format must be \"sata-report\"");
    if (!doc.contains("version") || doc["version"] != 1) throw ParseError("unsupported report version");
    if (!doc.contains("rows") || !doc["rows"].is_array()) throw ParseError("field 'rows' must be an array");
    std::vector<StatsRow> rows;
    for (const auto& obj : doc["rows"]) {
        if (!obj.is_object() || obj.size() != kColumns.size()) throw ParseError("report row has unexpected fields");
        StatsRow r;
        if (!obj.contains("label") || !obj["label"].is_string()) throw ParseError("report row: missing label");
        r.label = obj["label"].get<std::string>();
        for (const auto& c : kCounts) {
            if (!obj.contains(c.name) || !obj[c.name].is_number_unsigned()) {
                throw ParseError(std::string("report row: field '") + c.name + "' missing");
            }
            r.*c.member = obj[c.name].get<std::size_t>();
        }
        for (const auto& c : kReals) {
            if (!obj.contains(c.name) || !(obj[c.name].is_number() || obj[c.name].is_null())) {
                throw ParseError(std::string("report row: field '") + c.name + "' missing");
            }
            // null stands for an unbounded gain (nothing scheduled).
            r.*c.member = obj[c.name].is_null() ? std::numeric_limits<double>::infinity() : obj[c.name].get<double>();
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_report(std::span<const StatsRow> rows, ReportFormat format, const std::filesystem::path& path) {
    if (rows.empty()) throw InvalidArgument("emit_report: no rows");
    write_text_file(path, format == ReportFormat::json ? rows_to_json(rows) : rows_to_csv(rows));
}

std::vector<StatsRow> read_report(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return path.extension() == ".json" ? rows_from_json(text) : rows_from_csv(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace sata
