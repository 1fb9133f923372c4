#include "sata/scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "sata/error.hpp"

namespace sata {

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::init: return "INIT";
        case Phase::mac_first: return "MAC_FIRST";
        case Phase::mac_mid: return "MAC_MID";
        case Phase::mac_last: return "MAC_LAST";
        case Phase::wrap_load: return "WRAP_LOAD";
        case Phase::wrap_mac: return "WRAP_MAC";
    }
    return "INIT";
}

std::string_view to_string(ActiveKind a) {
    switch (a) {
        case ActiveKind::none: return "NONE";
        case ActiveKind::major: return "MAJOR";
        case ActiveKind::all: return "ALL";
        case ActiveKind::minor_glob: return "MINOR_GLOB";
        case ActiveKind::all_present: return "ALL_PRESENT";
    }
    return "NONE";
}

Phase parse_phase(std::string_view s) {
    for (Phase p : {Phase::init, Phase::mac_first, Phase::mac_mid, Phase::mac_last, Phase::wrap_load, Phase::wrap_mac}) {
        if (to_string(p) == s) return p;
    }
    throw ParseError("unknown phase '" + std::string(s) + "'");
}

ActiveKind parse_active_kind(std::string_view s) {
    for (ActiveKind a : {ActiveKind::none, ActiveKind::major, ActiveKind::all, ActiveKind::minor_glob,
                         ActiveKind::all_present}) {
        if (to_string(a) == s) return a;
    }
    throw ParseError("unknown active set '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------

std::vector<Tile> tile_mask(const HeadMask& head, const TileSpec& spec) {
    if (spec.s_f == 0) throw InvalidArgument("tile size must be positive");
    const std::size_t s_f = spec.s_f;
    const std::size_t q_folds = (head.rows() + s_f - 1) / s_f;
    const std::size_t k_folds = (head.cols() + s_f - 1) / s_f;

    std::vector<Tile> tiles;
    tiles.reserve(q_folds * k_folds);
    for (std::size_t kf = 0; kf < k_folds; ++kf) {
        for (std::size_t qf = 0; qf < q_folds; ++qf) {
            Tile t;
            t.q_fold = qf;
            t.k_fold = kf;
            for (std::size_t q = qf * s_f; q < std::min(head.rows(), (qf + 1) * s_f); ++q) t.rows.push_back(q);
            for (std::size_t k = kf * s_f; k < std::min(head.cols(), (kf + 1) * s_f); ++k) t.cols.push_back(k);
            t.mask = extract_submask(head, t.rows, t.cols);
            tiles.push_back(std::move(t));
        }
    }
    return tiles;
}

SkipResult zero_skip(const HeadMask& tile) {
    SkipResult r;
    for (std::size_t q = 0; q < tile.rows(); ++q) (tile.row_sum(q) > 0 ? r.kept_rows : r.skipped_rows).push_back(q);
    for (std::size_t k = 0; k < tile.cols(); ++k) (tile.col_sum(k) > 0 ? r.kept_cols : r.skipped_cols).push_back(k);
    r.reduced = extract_submask(tile, r.kept_rows, r.kept_cols);
    return r;
}

HeadMask extract_submask(const HeadMask& head, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    HeadMask out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) out.set(i, j, head.at(rows[i], cols[j]));
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

QClass major_class(const SortOutcome& o) { return o.head_type == HeadType::tail ? QClass::tail : QClass::head; }
QClass minor_class(const SortOutcome& o) { return o.head_type == HeadType::tail ? QClass::head : QClass::tail; }

std::vector<std::size_t> queries_where(const SortOutcome& o, auto pred) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < o.q_class.size(); ++q) {
        if (pred(o.q_class[q])) out.push_back(q);
    }
    return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

std::vector<std::size_t> map_indices(const std::vector<std::size_t>& local, const std::vector<std::size_t>& map) {
    std::vector<std::size_t> out;
    out.reserve(local.size());
    for (std::size_t i : local) out.push_back(map[i]);
    return out;
}

// Local-index step -> head-level step for subhead `id`.
ScheduleStep lift(ScheduleStep step, const Subhead& sub, std::size_t id) {
    step.head = id;
    step.load_head = id;
    step.q_loads = map_indices(step.q_loads, sub.rows);
    step.active = map_indices(step.active, sub.rows);
    step.retired = map_indices(step.retired, sub.rows);
    for (auto& km : step.k_macs) km.orig = sub.cols[km.orig];
    return step;
}

}  // namespace

std::vector<std::size_t> major_queries(const SortOutcome& o) {
    const QClass major = major_class(o);
    return queries_where(o, [major](QClass c) { return c == major || c == QClass::glob; });
}

std::vector<std::size_t> minor_queries(const SortOutcome& o) {
    const QClass minor = minor_class(o);
    return queries_where(o, [minor](QClass c) { return c == minor; });
}

std::vector<ScheduleStep> schedule_head(const SortOutcome& o) {
    if (!o.local()) throw InvalidArgument("schedule_head: GLOB heads are scheduled by wrap steps");
    const std::size_t n = o.n_keys();
    const std::size_t s = o.s_h;
    if (2 * s > n) throw InvalidArgument("schedule_head: s_h exceeds half the key count");

    std::vector<std::size_t> positions = all_indices(n);
    if (o.head_type == HeadType::tail) std::reverse(positions.begin(), positions.end());
    auto keys = [&](std::size_t from, std::size_t to) {
        std::vector<KeyMac> out;
        for (std::size_t i = from; i < to; ++i) out.push_back({positions[i], o.key_order[positions[i]]});
        return out;
    };

    const QClass major = major_class(o);
    const QClass minor = minor_class(o);
    const auto exclusive = queries_where(o, [major](QClass c) { return c == major; });
    const auto minor_glob = queries_where(o, [minor](QClass c) { return c == minor || c == QClass::glob; });
    const bool has_mid = n > 2 * s;

    std::vector<ScheduleStep> steps;
    ScheduleStep first;
    first.phase = Phase::mac_first;
    first.q_loads = minor_queries(o);
    first.k_macs = keys(0, s);
    first.active_kind = ActiveKind::major;
    first.active = major_queries(o);
    if (!has_mid) first.retired = exclusive;
    steps.push_back(std::move(first));

    if (has_mid) {
        ScheduleStep mid;
        mid.phase = Phase::mac_mid;
        mid.k_macs = keys(s, n - s);
        mid.active_kind = ActiveKind::all;
        mid.active = all_indices(o.n_queries());
        mid.retired = exclusive;
        steps.push_back(std::move(mid));
    }

    ScheduleStep last;
    last.phase = Phase::mac_last;
    last.k_macs = keys(n - s, n);
    last.active_kind = ActiveKind::minor_glob;
    last.active = minor_glob;
    last.retired = minor_glob;
    steps.push_back(std::move(last));

    for (auto& st : steps) {
        if (st.k_macs.empty()) {
            st.active_kind = ActiveKind::none;
            st.active.clear();
        }
    }
    return steps;
}

Schedule schedule_layer(std::vector<Subhead> subheads, std::span<const std::size_t> order) {
    {
        std::vector<std::size_t> check(order.begin(), order.end());
        std::sort(check.begin(), check.end());
        if (check != all_indices(subheads.size())) {
            throw InvalidArgument("schedule_layer: order must be a permutation of subhead indices");
        }
    }

    std::vector<std::size_t> locals;
    std::vector<std::size_t> globs;
    for (std::size_t id : order) (subheads[id].outcome.local() ? locals : globs).push_back(id);

    std::vector<ScheduleStep> raw;
    if (!locals.empty()) {
        ScheduleStep init;
        init.phase = Phase::init;
        init.head = init.load_head = locals.front();
        init.q_loads = map_indices(major_queries(subheads[locals.front()].outcome), subheads[locals.front()].rows);
        raw.push_back(std::move(init));
    }
    for (std::size_t j = 0; j < locals.size(); ++j) {
        const std::size_t id = locals[j];
        const Subhead& sub = subheads[id];
        for (auto& local_step : schedule_head(sub.outcome)) {
            ScheduleStep step = lift(std::move(local_step), sub, id);
            if (step.phase == Phase::mac_last && j + 1 < locals.size()) {
                const Subhead& next = subheads[locals[j + 1]];
                step.load_head = locals[j + 1];
                step.q_loads = map_indices(major_queries(next.outcome), next.rows);
            }
            raw.push_back(std::move(step));
        }
    }
    for (std::size_t id : globs) {
        const Subhead& sub = subheads[id];
        ScheduleStep load;
        load.phase = Phase::wrap_load;
        load.head = load.load_head = id;
        load.q_loads = sub.rows;
        raw.push_back(std::move(load));

        ScheduleStep mac;
        mac.phase = Phase::wrap_mac;
        mac.head = mac.load_head = id;
        for (std::size_t p = 0; p < sub.n_keys(); ++p) mac.k_macs.push_back({p, sub.cols[sub.outcome.key_order[p]]});
        mac.active_kind = ActiveKind::all_present;
        mac.active = sub.rows;
        mac.retired = sub.rows;
        raw.push_back(std::move(mac));
    }

    Schedule out;
    for (auto& step : raw) {
        if (step.q_loads.empty() && step.k_macs.empty()) {
            if (!step.retired.empty()) {
                assert(!out.steps.empty() && out.steps.back().head == step.head);
                auto& prev = out.steps.back().retired;
                prev.insert(prev.end(), step.retired.begin(), step.retired.end());
                std::sort(prev.begin(), prev.end());
            }
            continue;
        }
        out.steps.push_back(std::move(step));
    }
    out.subheads = std::move(subheads);
    return out;
}

Schedule schedule_layer(std::vector<Subhead> subheads) {
    const auto order = all_indices(subheads.size());
    return schedule_layer(std::move(subheads), order);
}

std::vector<MacPair> mac_pair_set(const Schedule& schedule) {
    std::vector<MacPair> pairs;
    for (const auto& step : schedule.steps) {
        for (const auto& km : step.k_macs) {
            for (std::size_t q : step.active) pairs.push_back({step.head, q, km.orig});
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

}  // namespace sata
