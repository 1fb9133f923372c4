#include <gtest/gtest.h>

#include "sata/error.hpp"
#include "sata/plan.hpp"
#include "sata/scheduler.hpp"
#include "test_util.hpp"

namespace sata {
namespace {

using test::all_ones;
using test::worked_head;
using Idx = std::vector<std::size_t>;

Subhead make_subhead(std::size_t head, HeadMask mask, std::size_t s_h_init, double theta = 2.0) {
    Subhead s;
    s.head = head;
    s.rows.resize(mask.rows());
    s.cols.resize(mask.cols());
    for (std::size_t i = 0; i < s.rows.size(); ++i) s.rows[i] = i;
    for (std::size_t i = 0; i < s.cols.size(); ++i) s.cols[i] = i;
    s.outcome = resolve_head(mask, {theta, s_h_init, std::min<std::size_t>(1, s_h_init), SeedPolicy::fixed(0)});
    s.mask = std::move(mask);
    return s;
}

std::vector<KeyMac> macs(std::initializer_list<std::pair<std::size_t, std::size_t>> l) {
    std::vector<KeyMac> out;
    for (auto [p, o] : l) out.push_back({p, o});
    return out;
}

TEST(ScheduleHead, WorkedHead) {
    const auto o = resolve_head(worked_head(), {2.0, 2, 1, SeedPolicy::fixed(0)});
    const auto steps = schedule_head(o);
    ASSERT_EQ(steps.size(), 2u);
    EXPECT_EQ(steps[0].phase, Phase::mac_first);
    EXPECT_EQ(steps[0].k_macs, macs({{0, 0}, {1, 1}}));
    EXPECT_EQ(steps[0].active_kind, ActiveKind::major);
    EXPECT_EQ(steps[0].active, (Idx{0, 1}));
    EXPECT_EQ(steps[0].q_loads, (Idx{2, 3}));
    EXPECT_EQ(steps[0].retired, (Idx{0, 1}));
    EXPECT_EQ(steps[1].phase, Phase::mac_last);
    EXPECT_EQ(steps[1].k_macs, macs({{2, 2}, {3, 3}}));
    EXPECT_EQ(steps[1].active, (Idx{2, 3}));
    EXPECT_TRUE(steps[1].q_loads.empty());
    EXPECT_EQ(steps[1].retired, (Idx{2, 3}));
}

TEST(ScheduleHead, MidPhaseWithSmallHeavySize) {
    const auto o = resolve_head(worked_head(), {2.0, 1, 1, SeedPolicy::fixed(0)});
    ASSERT_EQ(o.s_h, 1u);
    const auto steps = schedule_head(o);
    ASSERT_EQ(steps.size(), 3u);
    EXPECT_EQ(steps[0].k_macs.size(), 1u);
    EXPECT_EQ(steps[1].phase, Phase::mac_mid);
    EXPECT_EQ(steps[1].k_macs, macs({{1, 1}, {2, 2}}));
    EXPECT_EQ(steps[1].active_kind, ActiveKind::all);
    EXPECT_EQ(steps[1].active, (Idx{0, 1, 2, 3}));
    EXPECT_EQ(steps[1].retired, (Idx{0, 1}));
    EXPECT_TRUE(steps[0].retired.empty());
    EXPECT_EQ(steps[2].k_macs.size(), 1u);
}

TEST(ScheduleHead, TailHeadWalksKeysInReverse) {
    const auto mask = HeadMask::from_rows({"0011", "0011", "0011", "1100"});
    const auto o = resolve_head(mask, {2.0, 2, 1, SeedPolicy::fixed(0)});
    EXPECT_EQ(o.key_order, (Idx{0, 1, 2, 3}));
    EXPECT_EQ(o.counts, (ClassCounts{1, 3, 0}));
    ASSERT_EQ(o.head_type, HeadType::tail);
    const auto steps = schedule_head(o);
    ASSERT_EQ(steps.size(), 2u);
    EXPECT_EQ(steps[0].k_macs, macs({{3, 3}, {2, 2}}));
    EXPECT_EQ(steps[0].active, (Idx{0, 1, 2}));
    EXPECT_EQ(steps[0].q_loads, (Idx{3}));
    EXPECT_EQ(steps[1].k_macs, macs({{1, 1}, {0, 0}}));
    EXPECT_EQ(steps[1].active, (Idx{3}));
}

TEST(ScheduleHead, GlobOutcomeRejected) {
    const auto o = resolve_head(all_ones(4), {2.0, 2, 1, SeedPolicy::fixed(0)});
    EXPECT_THROW(schedule_head(o), InvalidArgument);
}

TEST(ScheduleHead, ZeroHeavySizeIsOneDenseMid) {
    const auto o = resolve_head(worked_head(), {2.0, 0, 0, SeedPolicy::fixed(0)});
    const auto steps = schedule_head(o);
    ASSERT_EQ(steps.size(), 3u);
    EXPECT_TRUE(steps[0].k_macs.empty());
    EXPECT_EQ(steps[0].active_kind, ActiveKind::none);
    EXPECT_EQ(steps[1].k_macs.size(), 4u);
    EXPECT_TRUE(steps[2].k_macs.empty());
}

TEST(ScheduleLayer, TwoWorkedHeadsPipeline) {
    std::vector<Subhead> subs{make_subhead(0, worked_head(), 2), make_subhead(1, worked_head(), 2)};
    const auto sched = schedule_layer(std::move(subs));
    ASSERT_EQ(sched.steps.size(), 5u);

    const auto& s = sched.steps;
    EXPECT_EQ(s[0].phase, Phase::init);
    EXPECT_EQ(s[0].q_loads, (Idx{0, 1}));
    EXPECT_TRUE(s[0].k_macs.empty());

    EXPECT_EQ(s[1].phase, Phase::mac_first);
    EXPECT_EQ(s[1].head, 0u);
    EXPECT_EQ(s[1].q_loads, (Idx{2, 3}));
    EXPECT_EQ(s[1].k_macs.size(), 2u);

    EXPECT_EQ(s[2].phase, Phase::mac_last);
    EXPECT_EQ(s[2].head, 0u);
    EXPECT_EQ(s[2].load_head, 1u);
    EXPECT_EQ(s[2].q_loads, (Idx{0, 1}));

    EXPECT_EQ(s[3].phase, Phase::mac_first);
    EXPECT_EQ(s[3].head, 1u);
    EXPECT_EQ(s[3].q_loads, (Idx{2, 3}));

    EXPECT_EQ(s[4].phase, Phase::mac_last);
    EXPECT_EQ(s[4].head, 1u);
    EXPECT_TRUE(s[4].q_loads.empty());
}

TEST(ScheduleLayer, GlobHeadsWrapAfterLocals) {
    const auto one = schedule_layer({make_subhead(0, all_ones(4), 2)});
    ASSERT_EQ(one.steps.size(), 2u);
    EXPECT_EQ(one.steps[0].phase, Phase::wrap_load);
    EXPECT_EQ(one.steps[0].q_loads, (Idx{0, 1, 2, 3}));
    EXPECT_EQ(one.steps[1].phase, Phase::wrap_mac);
    EXPECT_EQ(one.steps[1].active_kind, ActiveKind::all_present);
    EXPECT_EQ(one.steps[1].k_macs.size(), 4u);

    const auto two = schedule_layer({make_subhead(0, all_ones(4), 2), make_subhead(1, all_ones(4), 2)});
    ASSERT_EQ(two.steps.size(), 4u);
    EXPECT_EQ(two.steps[2].head, 1u);
    EXPECT_EQ(two.steps[3].phase, Phase::wrap_mac);

    const auto mixed = schedule_layer({make_subhead(0, all_ones(4), 2), make_subhead(1, worked_head(), 2)});
    ASSERT_EQ(mixed.steps.size(), 5u);
    EXPECT_EQ(mixed.steps[0].head, 1u);
    EXPECT_EQ(mixed.steps[3].phase, Phase::wrap_load);
    EXPECT_EQ(mixed.steps[3].head, 0u);
}

TEST(ScheduleLayer, RejectsBadOrder) {
    std::vector<Subhead> subs{make_subhead(0, worked_head(), 2)};
    const Idx order{1};
    EXPECT_THROW(schedule_layer(subs, order), InvalidArgument);
}

TEST(TileMask, KFoldMajorOrder) {
    const auto tiles = tile_mask(all_ones(8), {4, false});
    ASSERT_EQ(tiles.size(), 4u);
    const std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(tiles[i].q_fold, expected[i].first);
        EXPECT_EQ(tiles[i].k_fold, expected[i].second);
    }
    EXPECT_EQ(tiles[1].rows, (Idx{4, 5, 6, 7}));
    EXPECT_EQ(tiles[1].cols, (Idx{0, 1, 2, 3}));
}

TEST(TileMask, RaggedShapesAndIdentity) {
    const auto tiles = tile_mask(all_ones(6), {4, false});
    ASSERT_EQ(tiles.size(), 4u);
    const std::vector<std::pair<std::size_t, std::size_t>> shapes{{4, 4}, {2, 4}, {4, 2}, {2, 2}};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(tiles[i].mask.rows(), shapes[i].first);
        EXPECT_EQ(tiles[i].mask.cols(), shapes[i].second);
    }
    const auto whole = tile_mask(worked_head(), {4, false});
    ASSERT_EQ(whole.size(), 1u);
    EXPECT_EQ(whole[0].mask, worked_head());
    EXPECT_THROW(tile_mask(worked_head(), {0, false}), InvalidArgument);
}

TEST(ZeroSkip, DropsEmptyRowsAndColumns) {
    const auto tile = HeadMask::from_rows({"1000", "0000", "0000", "0000"});
    const auto r = zero_skip(tile);
    EXPECT_EQ(r.reduced.rows(), 1u);
    EXPECT_EQ(r.reduced.cols(), 1u);
    EXPECT_EQ(r.skipped_rows, (Idx{1, 2, 3}));
    EXPECT_EQ(r.skipped_cols, (Idx{1, 2, 3}));

    const auto same = zero_skip(worked_head());
    EXPECT_EQ(same.reduced, worked_head());
    EXPECT_TRUE(same.skipped_rows.empty());
    EXPECT_TRUE(same.skipped_cols.empty());

    const auto empty = zero_skip(HeadMask(3));
    EXPECT_EQ(empty.reduced.rows(), 0u);
    EXPECT_EQ(empty.skipped_rows.size(), 3u);
}

TEST(MacPairSet, CountsPerWorkload) {
    const auto worked = plan_layer(test::worked_mask(), {});
    const auto pairs = mac_pair_set(worked);
    ASSERT_EQ(pairs.size(), 8u);
    for (const auto& p : pairs) EXPECT_TRUE(test::worked_head().selected(p.query, p.key));

    EXPECT_EQ(mac_pair_set(schedule_layer({make_subhead(0, all_ones(4), 2)})).size(), 16u);

    // Two tiles of the worked head are entirely zero and never scheduled.
    PlanConfig tiled;
    tiled.tile = 2;
    tiled.zero_skip = true;
    const auto t = plan_layer(test::worked_mask(), tiled);
    EXPECT_EQ(t.subheads.size(), 2u);
    EXPECT_EQ(mac_pair_set(t).size(), 8u);
}

TEST(ScheduleFile, RoundTripAndDimensionCheck) {
    GeneratorSpec spec;
    spec.seq_len = 12;
    spec.k_per_query = 4;
    spec.n_heads = 3;
    spec.locality = Locality::banded(4);
    spec.noise = 0.25;
    const auto mask = generate_mask(spec);
    PlanConfig cfg;
    cfg.tile = 5;
    cfg.zero_skip = true;
    const auto sched = plan_layer(mask, cfg);
    const auto text = schedule_to_json(sched);
    const auto back = schedule_from_json(text, mask);
    EXPECT_EQ(back.steps, sched.steps);
    ASSERT_EQ(back.subheads.size(), sched.subheads.size());
    for (std::size_t i = 0; i < sched.subheads.size(); ++i) {
        EXPECT_EQ(back.subheads[i].mask, sched.subheads[i].mask);
        EXPECT_EQ(back.subheads[i].outcome.key_order, sched.subheads[i].outcome.key_order);
        EXPECT_EQ(back.subheads[i].outcome.q_class, sched.subheads[i].outcome.q_class);
        EXPECT_EQ(back.subheads[i].skipped_cols, sched.subheads[i].skipped_cols);
    }
    EXPECT_EQ(schedule_to_json(back), text);

    EXPECT_THROW(schedule_from_json(text, test::worked_mask()), ValidationError);
    EXPECT_THROW(schedule_from_json("{\"format\":\"sata-sched\",\"version\":2}", mask), ParseError);
    EXPECT_THROW(schedule_from_json("[", mask), ParseError);
    EXPECT_THROW(load_schedule("/nonexistent/s.json", mask), IoError);
}

}  // namespace
}  // namespace sata
