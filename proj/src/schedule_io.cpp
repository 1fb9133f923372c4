#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "sata/error.hpp"
#include "sata/scheduler.hpp"

namespace sata {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json classes_json(const std::vector<QClass>& classes) {
    ordered_json arr = ordered_json::array();
    for (QClass c : classes) arr.push_back(to_string(c));
    return arr;
}

std::size_t get_index(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number_unsigned()) {
        throw ParseError(where + ": field '" + key + "' must be a non-negative integer");
    }
    return obj[key].get<std::size_t>();
}

std::vector<std::size_t> get_indices(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_array()) throw ParseError(where + ": field '" + key + "' must be an array");
    std::vector<std::size_t> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number_unsigned()) throw ParseError(where + ": field '" + key + "' holds a non-index value");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

std::string get_string(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return obj[key].get<std::string>();
}

void require_below(const std::vector<std::size_t>& idx, std::size_t bound, const std::string& what) {
    for (std::size_t i : idx) {
        if (i >= bound) throw ValidationError(what + ": index " + std::to_string(i) + " out of range");
    }
}

}  // namespace

std::string schedule_to_json(const Schedule& schedule) {
    ordered_json doc;
    doc["format"] = "sata-sched";
    doc["version"] = 1;
    doc["seq_len"] = schedule.seq_len;
    doc["n_heads"] = schedule.n_heads;
    doc["s_f"] = schedule.tile.s_f;
    doc["zero_skip"] = schedule.tile.zero_skip;

    ordered_json subs = ordered_json::array();
    for (const auto& sub : schedule.subheads) {
        const auto& o = sub.outcome;
        ordered_json s;
        s["head"] = sub.head;
        s["q_fold"] = sub.q_fold;
        s["k_fold"] = sub.k_fold;
        s["n"] = sub.n_keys();
        s["n_q"] = sub.n_queries();
        s["s_h"] = o.s_h;
        s["s_h_init"] = o.s_h_init;
        s["decrements"] = o.decrements;
        s["head_type"] = to_string(o.head_type);
        s["q_class"] = classes_json(o.q_class);
        s["key_order"] = o.key_order;
        s["rows"] = sub.rows;
        s["cols"] = sub.cols;
        s["skipped_rows"] = sub.skipped_rows;
        s["skipped_cols"] = sub.skipped_cols;
        subs.push_back(std::move(s));
    }
    doc["subheads"] = std::move(subs);

    ordered_json steps = ordered_json::array();
    for (const auto& st : schedule.steps) {
        ordered_json s;
        s["phase"] = to_string(st.phase);
        s["head"] = st.head;
        s["load_head"] = st.load_head;
        s["q_loads"] = st.q_loads;
        ordered_json macs = ordered_json::array();
        for (const auto& km : st.k_macs) macs.push_back(ordered_json{{"pos", km.pos}, {"orig", km.orig}});
        s["k_macs"] = std::move(macs);
        s["active"] = to_string(st.active_kind);
        s["active_queries"] = st.active;
        s["retired"] = st.retired;
        steps.push_back(std::move(s));
    }
    doc["steps"] = std::move(steps);
    return doc.dump() + "\n";
}

Schedule schedule_from_json(const std::string& text, const SelectiveMask& mask) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != "sata-sched") throw ParseError("format must be \"sata-sched\"");
    if (!doc.contains("version") || doc["version"] != 1) throw ParseError("unsupported version");

    Schedule sched;
    sched.seq_len = get_index(doc, "seq_len", "schedule");
    sched.n_heads = get_index(doc, "n_heads", "schedule");
    sched.tile.s_f = get_index(doc, "s_f", "schedule");
    if (!doc.contains("zero_skip") || !doc["zero_skip"].is_boolean()) throw ParseError("schedule: 'zero_skip' must be boolean");
    sched.tile.zero_skip = doc["zero_skip"].get<bool>();
    if (sched.seq_len != mask.seq_len || sched.n_heads != mask.n_heads) {
        throw ValidationError("schedule is for " + std::to_string(sched.n_heads) + " heads of " +
                              std::to_string(sched.seq_len) + " tokens; mask has " + std::to_string(mask.n_heads) +
                              " heads of " + std::to_string(mask.seq_len));
    }
    const std::size_t n = mask.seq_len;

    if (!doc.contains("subheads") || !doc["subheads"].is_array()) throw ParseError("field 'subheads' must be an array");
    for (std::size_t i = 0; i < doc["subheads"].size(); ++i) {
        const auto& s = doc["subheads"][i];
        const std::string where = "subhead " + std::to_string(i);
        Subhead sub;
        sub.head = get_index(s, "head", where);
        sub.q_fold = get_index(s, "q_fold", where);
        sub.k_fold = get_index(s, "k_fold", where);
        sub.rows = get_indices(s, "rows", where);
        sub.cols = get_indices(s, "cols", where);
        sub.skipped_rows = get_indices(s, "skipped_rows", where);
        sub.skipped_cols = get_indices(s, "skipped_cols", where);
        if (sub.head >= mask.n_heads) throw ValidationError(where + ": head index out of range");
        require_below(sub.rows, n, where + " rows");
        require_below(sub.cols, n, where + " cols");
        require_below(sub.skipped_rows, n, where + " skipped_rows");
        require_below(sub.skipped_cols, n, where + " skipped_cols");
        if (get_index(s, "n", where) != sub.cols.size() || get_index(s, "n_q", where) != sub.rows.size()) {
            throw ValidationError(where + ": n/n_q disagree with index maps");
        }

        auto& o = sub.outcome;
        o.key_order = get_indices(s, "key_order", where);
        std::vector<std::size_t> perm = o.key_order;
        std::sort(perm.begin(), perm.end());
        std::vector<std::size_t> expect(sub.cols.size());
        std::iota(expect.begin(), expect.end(), std::size_t{0});
        if (perm != expect) throw ValidationError(where + ": key_order is not a permutation");

        if (!s.contains("q_class") || !s["q_class"].is_array()) throw ParseError(where + ": 'q_class' must be an array");
        for (const auto& c : s["q_class"]) {
            if (!c.is_string()) throw ParseError(where + ": 'q_class' entries must be strings");
            o.q_class.push_back(parse_qclass(c.get<std::string>()));
        }
        if (o.q_class.size() != sub.rows.size()) throw ValidationError(where + ": q_class length mismatch");
        o.head_type = parse_head_type(get_string(s, "head_type", where));
        o.s_h = get_index(s, "s_h", where);
        o.s_h_init = get_index(s, "s_h_init", where);
        o.decrements = get_index(s, "decrements", where);
        if (2 * o.s_h > sub.cols.size()) throw ValidationError(where + ": s_h exceeds half the key count");
        o.counts = count_classes(o.q_class);
        o.class_trace = {o.q_class};
        sub.mask = extract_submask(mask.heads[sub.head], sub.rows, sub.cols);
        sched.subheads.push_back(std::move(sub));
    }

    if (!doc.contains("steps") || !doc["steps"].is_array()) throw ParseError("field 'steps' must be an array");
    for (std::size_t i = 0; i < doc["steps"].size(); ++i) {
        const auto& s = doc["steps"][i];
        const std::string where = "step " + std::to_string(i);
        ScheduleStep st;
        st.phase = parse_phase(get_string(s, "phase", where));
        st.head = get_index(s, "head", where);
        st.load_head = get_index(s, "load_head", where);
        if (st.head >= sched.subheads.size() || st.load_head >= sched.subheads.size()) {
            throw ValidationError(where + ": subhead index out of range");
        }
        st.q_loads = get_indices(s, "q_loads", where);
        st.active_kind = parse_active_kind(get_string(s, "active", where));
        st.active = get_indices(s, "active_queries", where);
        st.retired = get_indices(s, "retired", where);
        require_below(st.q_loads, n, where + " q_loads");
        require_below(st.active, n, where + " active_queries");
        require_below(st.retired, n, where + " retired");
        if (!s.contains("k_macs") || !s["k_macs"].is_array()) throw ParseError(where + ": 'k_macs' must be an array");
        for (const auto& km : s["k_macs"]) {
            KeyMac mac{get_index(km, "pos", where), get_index(km, "orig", where)};
            if (mac.orig >= n) throw ValidationError(where + ": key index out of range");
            st.k_macs.push_back(mac);
        }
        sched.steps.push_back(std::move(st));
    }
    return sched;
}

void save_schedule(const Schedule& schedule, const std::filesystem::path& path) {
    write_text_file(path, schedule_to_json(schedule));
}

Schedule load_schedule(const std::filesystem::path& path, const SelectiveMask& mask) {
    return schedule_from_json(read_text_file(path), mask);
}

}  // namespace sata
