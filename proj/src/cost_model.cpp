#include "sata/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "sata/error.hpp"

namespace sata {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(CombineMode m) { return m == CombineMode::paper_min ? "paper_min" : "overlap_max"; }

CombineMode parse_combine_mode(std::string_view s) {
    if (s == "overlap_max") return CombineMode::overlap_max;
    if (s == "paper_min") return CombineMode::paper_min;
    throw InvalidArgument("combine mode must be overlap_max or paper_min, got '" + std::string(s) + "'");
}

void check_params(const CostParams& p) {
    for (double v : {p.t_rd_dt, p.t_wr_arr, p.t_rd_comp, p.t_wr_dt, p.e_mac_elem, p.e_load_elem,
                     p.sched_cycles_per_key, p.sched_energy_per_round}) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("cost constants must be finite and non-negative");
    }
    if (!(p.d_k >= 1.0) || !std::isfinite(p.d_k)) throw InvalidArgument("d_k must be at least 1");
}

namespace {

struct NumberField {
    const char* name;
    double CostParams::*member;
};

constexpr NumberField kNumberFields[] = {
    {"t_rd_dt", &CostParams::t_rd_dt},
    {"t_wr_arr", &CostParams::t_wr_arr},
    {"t_rd_comp", &CostParams::t_rd_comp},
    {"t_wr_dt", &CostParams::t_wr_dt},
    {"d_k", &CostParams::d_k},
    {"e_mac_elem", &CostParams::e_mac_elem},
    {"e_load_elem", &CostParams::e_load_elem},
    {"sched_cycles_per_key", &CostParams::sched_cycles_per_key},
    {"sched_energy_per_round", &CostParams::sched_energy_per_round},
};

double ratio(double baseline, double scheduled) {
    if (scheduled > 0.0) return baseline / scheduled;
    return baseline > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

std::size_t fold_extent(std::size_t fold, std::size_t s_f, std::size_t n) {
    return std::min(n, (fold + 1) * s_f) - fold * s_f;
}

template <typename TileEnergy>
LatencyEnergy tiled_baseline(const SelectiveMask& mask, std::size_t s_f, const CostParams& p, TileEnergy mac_pairs) {
    check_params(p);
    if (s_f == 0) throw InvalidArgument("tile size must be positive");
    const std::size_t n = mask.seq_len;
    const std::size_t folds = (n + s_f - 1) / s_f;
    LatencyEnergy out;
    for (std::size_t h = 0; h < mask.heads.size(); ++h) {
        for (std::size_t kf = 0; kf < folds; ++kf) {
            for (std::size_t qf = 0; qf < folds; ++qf) {
                const auto r = static_cast<double>(fold_extent(qf, s_f, n));
                const auto c = static_cast<double>(fold_extent(kf, s_f, n));
                out.latency += r * (p.t_wr_arr + p.t_wr_dt) + c * (p.t_rd_dt + p.t_rd_comp);
                out.energy += mac_pairs(h, qf, kf) * p.d_k * p.e_mac_elem + r * p.d_k * p.e_load_elem;
            }
        }
    }
    return out;
}

}  // namespace

CostParams cost_params_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid cost config JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("cost config must be a JSON object");

    CostParams p;
    for (const auto& [key, value] : doc.items()) {
        bool known = false;
        for (const auto& f : kNumberFields) {
            if (key == f.name) {
                if (!value.is_number()) throw ParseError("cost config: '" + key + "' must be a number");
                p.*f.member = value.get<double>();
                known = true;
            }
        }
        if (known) continue;
        if (key == "combine_mode") {
            if (!value.is_string()) throw ParseError("cost config: 'combine_mode' must be a string");
            p.combine_mode = parse_combine_mode(value.get<std::string>());
        } else if (key == "glob_energy_gated") {
            if (!value.is_boolean()) throw ParseError("cost config: 'glob_energy_gated' must be a boolean");
            p.glob_energy_gated = value.get<bool>();
        } else {
            throw ParseError("cost config: unknown key '" + key + "'");
        }
    }
    check_params(p);
    return p;
}

std::string cost_params_to_json(const CostParams& p) {
    ordered_json doc;
    doc["t_rd_dt"] = p.t_rd_dt;
    doc["t_wr_arr"] = p.t_wr_arr;
    doc["t_rd_comp"] = p.t_rd_comp;
    doc["t_wr_dt"] = p.t_wr_dt;
    doc["d_k"] = p.d_k;
    doc["e_mac_elem"] = p.e_mac_elem;
    doc["e_load_elem"] = p.e_load_elem;
    doc["combine_mode"] = to_string(p.combine_mode);
    doc["glob_energy_gated"] = p.glob_energy_gated;
    doc["sched_cycles_per_key"] = p.sched_cycles_per_key;
    doc["sched_energy_per_round"] = p.sched_energy_per_round;
    return doc.dump(2) + "\n";
}

CostParams load_cost_params(const std::filesystem::path& path) { return cost_params_from_json(read_text_file(path)); }

double step_latency(std::size_t x_keys, std::size_t y_loads, const CostParams& p) {
    if (x_keys == 0 && y_loads == 0) throw InvalidArgument("step_latency: step has neither MACs nor loads");
    const auto x = static_cast<double>(x_keys);
    const auto y = static_cast<double>(y_loads);
    if (x_keys == 0) return y * (p.t_wr_arr + p.t_wr_dt);
    if (y_loads == 0) return x * (p.t_rd_dt + p.t_rd_comp);
    if (p.combine_mode == CombineMode::paper_min) {
        return std::min(p.t_rd_dt * x, p.t_wr_arr * y) + std::min(p.t_rd_comp * x, p.t_wr_dt * y);
    }
    return std::max(p.t_rd_dt * x, p.t_wr_arr * y) + std::max(p.t_rd_comp * x, p.t_wr_dt * y);
}

LatencyEnergy baseline_dense(std::size_t n, std::size_t n_heads, const CostParams& p) {
    check_params(p);
    if (n == 0) throw InvalidArgument("baseline_dense: n must be positive");
    const auto nn = static_cast<double>(n);
    const auto heads = static_cast<double>(n_heads);
    LatencyEnergy out;
    out.latency = heads * (nn * (p.t_wr_arr + p.t_wr_dt) + nn * (p.t_rd_dt + p.t_rd_comp));
    out.energy = heads * (nn * nn * p.d_k * p.e_mac_elem + nn * p.d_k * p.e_load_elem);
    return out;
}

LatencyEnergy baseline_pruned(const SelectiveMask& mask, const CostParams& p) {
    return baseline_pruned_tiled(mask, mask.seq_len, p);
}

LatencyEnergy baseline_dense_tiled(const SelectiveMask& mask, std::size_t s_f, const CostParams& p) {
    const std::size_t n = mask.seq_len;
    return tiled_baseline(mask, s_f, p, [&](std::size_t, std::size_t qf, std::size_t kf) {
        return static_cast<double>(fold_extent(qf, s_f, n) * fold_extent(kf, s_f, n));
    });
}

LatencyEnergy baseline_pruned_tiled(const SelectiveMask& mask, std::size_t s_f, const CostParams& p) {
    const std::size_t n = mask.seq_len;
    return tiled_baseline(mask, s_f, p, [&](std::size_t h, std::size_t qf, std::size_t kf) {
        std::size_t support = 0;
        for (std::size_t q = qf * s_f; q < std::min(n, (qf + 1) * s_f); ++q) {
            for (std::size_t k = kf * s_f; k < std::min(n, (kf + 1) * s_f); ++k) support += mask.heads[h].selected(q, k);
        }
        return static_cast<double>(support);
    });
}

SchedulerOverhead scheduler_overhead(std::size_t n_sub, double compute_latency, const CostParams& p) {
    if (n_sub == 0) throw InvalidArgument("scheduler_overhead: subhead size must be positive");
    SchedulerOverhead o;
    o.latency = p.sched_cycles_per_key * static_cast<double>(n_sub);
    o.energy = o.latency * p.sched_energy_per_round;
    o.hidden = o.latency <= compute_latency;
    o.exposed = std::max(0.0, o.latency - compute_latency);
    return o;
}

SimReport simulate(const Schedule& schedule, const SelectiveMask& mask, const CostParams& p) {
    check_params(p);
    if (schedule.seq_len != mask.seq_len || schedule.n_heads != mask.n_heads || mask.heads.size() != mask.n_heads) {
        throw ValidationError("simulate: schedule and mask dimensions differ");
    }
    for (const auto& sub : schedule.subheads) {
        if (sub.head >= mask.n_heads) throw ValidationError("simulate: subhead refers to a missing head");
    }

    SimReport r;
    std::vector<double> compute_per_subhead(schedule.subheads.size(), 0.0);
    double read_time = 0.0;
    std::size_t resident = 0;
    for (const auto& step : schedule.steps) {
        if (step.head >= schedule.subheads.size()) throw ValidationError("simulate: step refers to a missing subhead");
        const double t = step_latency(step.k_macs.size(), step.q_loads.size(), p);
        r.step_latencies.push_back(t);
        r.compute_latency += t;
        compute_per_subhead[step.head] += t;
        read_time += static_cast<double>(step.k_macs.size()) * (p.t_rd_dt + p.t_rd_comp);

        double pairs = static_cast<double>(step.k_macs.size() * step.active.size());
        if (step.phase == Phase::wrap_mac && p.glob_energy_gated) {
            const HeadMask& head = mask.heads[schedule.subheads[step.head].head];
            std::size_t supported = 0;
            for (const auto& km : step.k_macs) {
                for (std::size_t q : step.active) supported += head.selected(q, km.orig);
            }
            pairs = static_cast<double>(supported);
        }
        r.mac_pairs += pairs;
        r.mac_energy += pairs * p.d_k * p.e_mac_elem;
        r.load_energy += static_cast<double>(step.q_loads.size()) * p.d_k * p.e_load_elem;

        resident += step.q_loads.size();
        r.occupancy_trace.push_back(resident);
        resident -= std::min(resident, step.retired.size());
    }

    for (std::size_t i = 0; i < schedule.subheads.size(); ++i) {
        const auto o = scheduler_overhead(schedule.subheads[i].n_keys(), compute_per_subhead[i], p);
        r.sched_overhead_latency += o.latency;
        r.sched_overhead_energy += o.energy;
        r.sched_overhead_exposed += o.exposed;
        r.overhead_per_subhead.push_back(o);
    }

    r.scheduled_latency = r.compute_latency + r.sched_overhead_exposed;
    r.scheduled_energy = r.mac_energy + r.load_energy + r.sched_overhead_energy;
    // Under paper_min a step can be shorter than its read stream; cap at 1.
    r.utilization = r.scheduled_latency > 0.0 ? std::min(1.0, read_time / r.scheduled_latency) : 0.0;

    const std::size_t s_f = schedule.tile.s_f == 0 ? mask.seq_len : schedule.tile.s_f;
    const auto dense = baseline_dense_tiled(mask, s_f, p);
    const auto pruned = baseline_pruned_tiled(mask, s_f, p);
    r.dense_latency = dense.latency;
    r.dense_energy = dense.energy;
    r.pruned_latency = pruned.latency;
    r.pruned_energy = pruned.energy;
    r.throughput_gain_dense = ratio(r.dense_latency, r.scheduled_latency);
    r.throughput_gain_pruned = ratio(r.pruned_latency, r.scheduled_latency);
    r.energy_gain_dense = ratio(r.dense_energy, r.scheduled_energy);
    r.energy_gain_pruned = ratio(r.pruned_energy, r.scheduled_energy);
    return r;
}

}  // namespace sata
