#include <algorithm>

#include <gtest/gtest.h>

#include "sata/error.hpp"
#include "sata/oracle.hpp"
#include "sata/plan.hpp"
#include "test_util.hpp"

namespace sata {
namespace {

using oracle::ViolationKind;
using oracle::ViolationList;

std::size_t count_kind(const ViolationList& v, ViolationKind k) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [k](const auto& x) { return x.kind == k; }));
}

Schedule worked_with_mid() {
    PlanConfig cfg;
    cfg.s_h_init_fraction = 0.25;  // s_h = 1 leaves two middle keys
    return plan_layer(test::worked_mask(), cfg);
}

TEST(ReplaySort, MatchesIncrementalSorter) {
    EXPECT_EQ(oracle::replay_sort(test::worked_head()), (std::vector<std::size_t>{0, 1, 2, 3}));
    const auto ones = oracle::replay_sort(test::all_ones(8));
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(ones[i], i);

    SplitMix64 rng(300);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = 1 + rng.below(32);
        const auto mask = test::random_head(n, n, static_cast<double>(rng.below(101)) / 100.0, rng);
        const SeedPolicy seed = rng.below(2) ? SeedPolicy::fixed(rng.below(n)) : SeedPolicy::random(rng.next());
        ASSERT_EQ(oracle::replay_sort(mask, seed), sort_keys(mask, seed).key_order) << "case " << i;
    }
}

TEST(MaterializeDummy, ColumnSums) {
    EXPECT_EQ(oracle::materialize_dummy(test::worked_head(), {0, 1}), (std::vector<std::int64_t>{2, 2, 0, 0}));
    EXPECT_EQ(oracle::materialize_dummy(test::worked_head(), {}), (std::vector<std::int64_t>{0, 0, 0, 0}));
}

TEST(ValidateSchedule, CleanSchedulesPass) {
    EXPECT_TRUE(oracle::validate_schedule(plan_layer(test::worked_mask(), {}), test::worked_mask()).empty());
    EXPECT_TRUE(oracle::validate_schedule(worked_with_mid(), test::worked_mask()).empty());
    const auto ones = test::single_head(test::all_ones(5), 5);
    EXPECT_TRUE(oracle::validate_schedule(plan_layer(ones, {}), ones).empty());
}

TEST(ValidateSchedule, DroppedKeyMacIsMissingPair) {
    auto sched = plan_layer(test::worked_mask(), {});
    auto& first = sched.steps[1];
    ASSERT_EQ(first.phase, Phase::mac_first);
    first.k_macs.erase(first.k_macs.begin());  // key 0 against Q0, Q1
    const auto v = oracle::validate_schedule(sched, test::worked_mask());
    EXPECT_EQ(count_kind(v, ViolationKind::missing_pair), 2u);
    EXPECT_EQ(count_kind(v, ViolationKind::duplicate_pair), 0u);
}

TEST(ValidateSchedule, DuplicatedMidIsDuplicatePair) {
    auto sched = worked_with_mid();
    const auto mid = std::find_if(sched.steps.begin(), sched.steps.end(),
                                  [](const auto& s) { return s.phase == Phase::mac_mid; });
    ASSERT_NE(mid, sched.steps.end());
    sched.steps.insert(mid, *mid);
    const auto v = oracle::validate_schedule(sched, test::worked_mask());
    EXPECT_EQ(count_kind(v, ViolationKind::duplicate_pair), 8u);  // 2 keys x 4 queries
    EXPECT_GT(count_kind(v, ViolationKind::load_order), 0u);      // Q0, Q1 now retire twice
}

TEST(ValidateSchedule, LateLoadIsLoadOrder) {
    auto sched = plan_layer(test::worked_mask(), {});
    // Move the minor loads from MAC_FIRST onto MAC_LAST, where they are used.
    sched.steps[2].q_loads = sched.steps[1].q_loads;
    sched.steps[1].q_loads.clear();
    const auto v = oracle::validate_schedule(sched, test::worked_mask());
    EXPECT_EQ(count_kind(v, ViolationKind::load_order), 2u);
    EXPECT_EQ(count_kind(v, ViolationKind::missing_pair), 0u);

    auto unloaded = plan_layer(test::worked_mask(), {});
    unloaded.steps[0].q_loads.pop_back();
    EXPECT_EQ(count_kind(oracle::validate_schedule(unloaded, test::worked_mask()), ViolationKind::load_order), 1u);
}

TEST(ValidateSchedule, WrongClassIsClassError) {
    auto sched = plan_layer(test::worked_mask(), {});
    sched.subheads[0].outcome.q_class[0] = QClass::glob;
    const auto v = oracle::validate_schedule(sched, test::worked_mask());
    EXPECT_EQ(count_kind(v, ViolationKind::class_error), 1u);

    auto typed = plan_layer(test::worked_mask(), {});
    typed.subheads[0].outcome.head_type = HeadType::tail;
    EXPECT_EQ(count_kind(oracle::validate_schedule(typed, test::worked_mask()), ViolationKind::class_error), 1u);
}

TEST(ValidateSchedule, UnjustifiedSkipIsIllegalExclusion) {
    // Drop Q0 from the MAC_LAST of an s_h = 1 schedule; (Q0, key 3) is unselected
    // but Q0 is HEAD, so that exclusion is legal. Excluding it from MAC_MID is not.
    auto sched = worked_with_mid();
    auto mid = std::find_if(sched.steps.begin(), sched.steps.end(),
                            [](const auto& s) { return s.phase == Phase::mac_mid; });
    ASSERT_NE(mid, sched.steps.end());
    // Key at sorted position 2 is key 2, unselected by Q0.
    ASSERT_EQ(mid->k_macs.back().orig, 2u);
    auto moved = *mid;
    moved.k_macs = {mid->k_macs.back()};
    moved.active = {1, 2, 3};
    moved.retired.clear();
    moved.q_loads.clear();
    mid->k_macs.pop_back();
    sched.steps.insert(mid + 1, moved);
    const auto v = oracle::validate_schedule(sched, test::worked_mask());
    EXPECT_EQ(count_kind(v, ViolationKind::illegal_exclusion), 1u);
    EXPECT_EQ(count_kind(v, ViolationKind::missing_pair), 0u);
}

TEST(CountPairs, EnumerationAndClosedForm) {
    const auto worked = resolve_head(test::worked_head(), {2.0, 2, 1, {}});
    EXPECT_EQ(oracle::count_pairs_enumerated(worked), 8u);
    EXPECT_EQ(oracle::closed_form_pairs(worked), 8u);

    const auto no_heavy = resolve_head(test::worked_head(), {2.0, 0, 0, {}});
    EXPECT_EQ(oracle::count_pairs_enumerated(no_heavy), 16u);

    // Every query GLOB, but theta tolerates them: a = b = 0.
    const auto all_glob = resolve_head(test::all_ones(4), {4.0, 2, 1, {}});
    ASSERT_TRUE(all_glob.local());
    EXPECT_EQ(all_glob.counts.glob, 4u);
    EXPECT_EQ(oracle::count_pairs_enumerated(all_glob), 16u);

    const auto glob = resolve_head(test::all_ones(4), {2.0, 2, 1, {}});
    EXPECT_THROW(oracle::count_pairs_enumerated(glob), InvalidArgument);
}

TEST(CountPairs, AgreesWithScheduleOnRandomHeads) {
    SplitMix64 rng(17);
    for (int i = 0; i < 300; ++i) {
        const std::size_t rows = 1 + rng.below(20);
        const std::size_t cols = 2 + rng.below(20);
        const auto mask = test::random_head(rows, cols, static_cast<double>(1 + rng.below(50)) / 100.0, rng);
        const auto o = resolve_head(mask, {static_cast<double>(rng.below(rows + 1)), cols / 2, 0, {}});
        if (!o.local()) continue;
        std::size_t scheduled = 0;
        for (const auto& st : schedule_head(o)) scheduled += st.k_macs.size() * st.active.size();
        ASSERT_EQ(oracle::count_pairs_enumerated(o), oracle::closed_form_pairs(o));
        ASSERT_EQ(scheduled, oracle::closed_form_pairs(o));
    }
}

}  // namespace
}  // namespace sata
