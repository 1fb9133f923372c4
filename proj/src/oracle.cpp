#include "sata/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "sata/error.hpp"

namespace sata::oracle {

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::missing_pair: return "MISSING_PAIR";
        case ViolationKind::duplicate_pair: return "DUPLICATE_PAIR";
        case ViolationKind::illegal_exclusion: return "ILLEGAL_EXCLUSION";
        case ViolationKind::load_order: return "LOAD_ORDER";
        case ViolationKind::class_error: return "CLASS_ERROR";
    }
    return "CLASS_ERROR";
}

std::vector<std::int64_t> materialize_dummy(const HeadMask& mask, const std::vector<std::size_t>& sorted_keys) {
    std::vector<std::int64_t> dummy(mask.rows(), 0);
    for (std::size_t k : sorted_keys) {
        for (std::size_t q = 0; q < mask.rows(); ++q) dummy[q] += mask.at(q, k);
    }
    return dummy;
}

std::vector<std::size_t> replay_sort(const HeadMask& mask, SeedPolicy seed) {
    const std::size_t n = mask.cols();
    if (n == 0 || mask.rows() == 0) throw InvalidArgument("replay_sort: empty mask dimension");
    std::vector<std::size_t> order{seed.pick(n)};
    std::vector<bool> taken(n, false);
    taken[order.front()] = true;
    while (order.size() < n) {
        const auto dummy = materialize_dummy(mask, order);
        std::size_t best = n;
        std::int64_t best_score = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const auto col = mask.column(i);
            const std::int64_t score = direct_distance(dummy, col);
            if (score > best_score) {
                best = i;
                best_score = score;
            }
        }
        taken[best] = true;
        order.push_back(best);
    }
    return order;
}

std::size_t count_pairs_enumerated(const SortOutcome& o) {
    if (!o.local()) throw InvalidArgument("count_pairs_enumerated: GLOB head");
    const std::size_t n = o.n_keys();
    const std::size_t s = o.s_h;
    const bool tail_type = o.head_type == HeadType::tail;

    struct PhaseSpan {
        std::size_t from, to;
        bool head_q, tail_q, glob_q;
    };
    const PhaseSpan first = tail_type ? PhaseSpan{n - s, n, false, true, true} : PhaseSpan{0, s, true, false, true};
    const PhaseSpan mid{s, n - s, true, true, true};
    const PhaseSpan last = tail_type ? PhaseSpan{0, s, true, false, true} : PhaseSpan{n - s, n, false, true, true};

    std::size_t pairs = 0;
    for (const PhaseSpan& ph : {first, mid, last}) {
        for (std::size_t p = ph.from; p < ph.to; ++p) {
            for (QClass c : o.q_class) {
                pairs += (c == QClass::head && ph.head_q) || (c == QClass::tail && ph.tail_q) ||
                         (c == QClass::glob && ph.glob_q);
            }
        }
    }
    return pairs;
}

std::size_t closed_form_pairs(const SortOutcome& o) {
    std::size_t a = 0;
    std::size_t b = 0;
    for (QClass c : o.q_class) {
        a += c == QClass::head;
        b += c == QClass::tail;
    }
    return o.n_queries() * o.n_keys() - o.s_h * (a + b);
}

namespace {

constexpr std::size_t kNoOwner = static_cast<std::size_t>(-1);

bool contains(const std::vector<std::size_t>& v, std::size_t x) { return std::find(v.begin(), v.end(), x) != v.end(); }

void check_classes(const Schedule& schedule, const SelectiveMask& mask, ViolationList& out) {
    for (std::size_t id = 0; id < schedule.subheads.size(); ++id) {
        const Subhead& sub = schedule.subheads[id];
        const SortOutcome& o = sub.outcome;
        const std::size_t n = sub.n_keys();

        std::vector<std::size_t> perm = o.key_order;
        std::sort(perm.begin(), perm.end());
        std::vector<std::size_t> expect(n);
        std::iota(expect.begin(), expect.end(), std::size_t{0});
        if (perm != expect || o.q_class.size() != sub.n_queries() || 2 * o.s_h > n) {
            out.push_back({ViolationKind::class_error, id, 0, 0, "malformed sort outcome"});
            continue;
        }

        const HeadMask& head = mask.heads[sub.head];
        std::size_t a = 0;
        std::size_t b = 0;
        for (std::size_t i = 0; i < sub.n_queries(); ++i) {
            bool in_first = false;
            bool in_last = false;
            for (std::size_t p = 0; p < n; ++p) {
                if (!head.selected(sub.rows[i], sub.cols[o.key_order[p]])) continue;
                in_first = in_first || p < o.s_h;
                in_last = in_last || p >= n - o.s_h;
            }
            const QClass want = !in_last ? QClass::head : (!in_first ? QClass::tail : QClass::glob);
            a += want == QClass::head;
            b += want == QClass::tail;
            if (o.q_class[i] != want) {
                out.push_back({ViolationKind::class_error, id, sub.rows[i], 0,
                               "query tagged " + std::string(sata::to_string(o.q_class[i])) + ", expected " +
                                   std::string(sata::to_string(want))});
            }
        }
        if (o.local()) {
            const HeadType want = a >= b ? HeadType::head : HeadType::tail;
            if (o.head_type != want) out.push_back({ViolationKind::class_error, id, 0, 0, "head type disagrees with counts"});
        }
    }
}

void check_loads(const Schedule& schedule, ViolationList& out) {
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    for (std::size_t id = 0; id < schedule.subheads.size(); ++id) {
        const Subhead& sub = schedule.subheads[id];
        for (std::size_t q : sub.rows) {
            std::size_t loads = 0;
            std::size_t retires = 0;
            std::size_t load_at = kUnset;
            std::size_t retire_at = kUnset;
            std::size_t first_use = kUnset;
            std::size_t last_use = kUnset;
            for (std::size_t t = 0; t < schedule.steps.size(); ++t) {
                const auto& st = schedule.steps[t];
                if (st.load_head == id && contains(st.q_loads, q)) {
                    ++loads;
                    load_at = t;
                }
                if (st.head != id) continue;
                if (!st.k_macs.empty() && contains(st.active, q)) {
                    if (first_use == kUnset) first_use = t;
                    last_use = t;
                }
                if (contains(st.retired, q)) {
                    ++retires;
                    retire_at = t;
                }
            }
            auto fail = [&](const std::string& msg) { out.push_back({ViolationKind::load_order, id, q, 0, msg}); };
            if (loads != 1) {
                fail("loaded " + std::to_string(loads) + " times");
                continue;
            }
            if (retires != 1) {
                fail("retired " + std::to_string(retires) + " times");
                continue;
            }
            if (first_use != kUnset && first_use <= load_at) fail("used before its load completed");
            if (retire_at < load_at || (last_use != kUnset && retire_at < last_use)) fail("retired before its last use");
        }
        for (std::size_t t = 0; t < schedule.steps.size(); ++t) {
            const auto& st = schedule.steps[t];
            for (std::size_t q : st.load_head == id ? st.q_loads : std::vector<std::size_t>{}) {
                if (!contains(sub.rows, q)) out.push_back({ViolationKind::load_order, id, q, 0, "load of a foreign query"});
            }
        }
    }
}

}  // namespace

ViolationList validate_schedule(const Schedule& schedule, const SelectiveMask& mask) {
    ViolationList out;
    const std::size_t n = mask.seq_len;
    for (const auto& sub : schedule.subheads) {
        if (sub.head >= mask.heads.size()) {
            out.push_back({ViolationKind::class_error, sub.head, 0, 0, "subhead refers to a missing head"});
            return out;
        }
    }

    // Pair multiplicities and the subhead owning each cell.
    std::vector<std::vector<std::uint32_t>> count(mask.heads.size(), std::vector<std::uint32_t>(n * n, 0));
    std::vector<std::vector<std::size_t>> owner(mask.heads.size(), std::vector<std::size_t>(n * n, kNoOwner));
    for (std::size_t id = 0; id < schedule.subheads.size(); ++id) {
        const Subhead& sub = schedule.subheads[id];
        std::vector<std::size_t> region_rows = sub.rows;
        region_rows.insert(region_rows.end(), sub.skipped_rows.begin(), sub.skipped_rows.end());
        std::vector<std::size_t> region_cols = sub.cols;
        region_cols.insert(region_cols.end(), sub.skipped_cols.begin(), sub.skipped_cols.end());
        for (std::size_t q : region_rows) {
            for (std::size_t k : region_cols) owner[sub.head][q * n + k] = id;
        }
    }
    for (const auto& st : schedule.steps) {
        if (st.head >= schedule.subheads.size()) continue;
        const std::size_t h = schedule.subheads[st.head].head;
        for (const auto& km : st.k_macs) {
            for (std::size_t q : st.active) {
                if (q < n && km.orig < n) ++count[h][q * n + km.orig];
            }
        }
    }

    for (std::size_t h = 0; h < mask.heads.size(); ++h) {
        for (std::size_t q = 0; q < n; ++q) {
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint32_t c = count[h][q * n + k];
                const bool selected = mask.heads[h].selected(q, k);
                if (c > 1) {
                    out.push_back({ViolationKind::duplicate_pair, h, q, k, "MAC'd " + std::to_string(c) + " times"});
                }
                if (c > 0) continue;
                if (selected) {
                    out.push_back({ViolationKind::missing_pair, h, q, k, "selected pair never MAC'd"});
                    continue;
                }
                const std::size_t id = owner[h][q * n + k];
                if (id == kNoOwner) continue;  // dropped all-zero tile
                const Subhead& sub = schedule.subheads[id];
                if (contains(sub.skipped_rows, q) || contains(sub.skipped_cols, k)) continue;
                const auto row_it = std::find(sub.rows.begin(), sub.rows.end(), q);
                const auto col_it = std::find(sub.cols.begin(), sub.cols.end(), k);
                bool legal = false;
                const auto& o = sub.outcome;
                if (o.local() && row_it != sub.rows.end() && col_it != sub.cols.end() &&
                    o.q_class.size() == sub.n_queries()) {
                    const auto local_q = static_cast<std::size_t>(row_it - sub.rows.begin());
                    const auto local_k = static_cast<std::size_t>(col_it - sub.cols.begin());
                    const auto pos_it = std::find(o.key_order.begin(), o.key_order.end(), local_k);
                    const auto pos = static_cast<std::size_t>(pos_it - o.key_order.begin());
                    const std::size_t nk = sub.n_keys();
                    legal = (o.q_class[local_q] == QClass::head && pos >= nk - o.s_h && pos < nk) ||
                            (o.q_class[local_q] == QClass::tail && pos < o.s_h);
                }
                if (!legal) out.push_back({ViolationKind::illegal_exclusion, h, q, k, "unselected pair skipped without a rule"});
            }
        }
    }

    check_loads(schedule, out);
    check_classes(schedule, mask, out);
    return out;
}

}  // namespace sata::oracle
