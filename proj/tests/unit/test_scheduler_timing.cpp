#include <gtest/gtest.h>

#include <cmath>

#include "xrtgr/scheduler.hpp"
#include "xrtgr/timing.hpp"

using namespace xrtgr;

namespace {

Candidate fixed(int flow, PriorityClass cls, double rate, int prbs) {
  Candidate c;
  c.flow = flow;
  c.cls = cls;
  c.inst_rate = rate;
  c.grant = [prbs](int max_prb) -> std::optional<Grant> { return Grant{std::min(prbs, max_prb), 5, 1000}; };
  return c;
}

}  // namespace

TEST(Tdd, PatternDDDSU) {
  const char expected[] = "DDDSUDDDSU";
  for (long s = 0; s < 10; ++s) EXPECT_EQ(to_char(slot_type(s)), expected[s]);
  EXPECT_FALSE(dl_capable(SlotType::U));
  const auto cfg = default_config();
  EXPECT_EQ(dl_data_symbols(SlotType::D, cfg), 13);
  EXPECT_EQ(dl_data_symbols(SlotType::S, cfg), 10);
  EXPECT_EQ(dl_data_symbols(SlotType::U, cfg), 0);
  EXPECT_THROW(slot_type(0, ""), std::invalid_argument);
}

TEST(Scheduler, RetransmissionsFirst) {
  PfState pf(3, 100.0);
  std::vector<Candidate> c{fixed(0, PriorityClass::XrNew, 100.0, 100), fixed(1, PriorityClass::EmbbNew, 1e6, 100),
                           fixed(2, PriorityClass::XrRetx, 1.0, 100)};
  const auto a = schedule_slot(c, pf, 0, SlotType::D, 273, 13);
  ASSERT_EQ(a.entries.size(), 3u);
  EXPECT_EQ(a.entries[0].flow, 2);
  EXPECT_EQ(a.entries[0].prb_start, 0);
  EXPECT_EQ(a.entries[1].flow, 0);
  EXPECT_EQ(a.entries[1].prb_start, 100);
  EXPECT_EQ(a.entries[2].flow, 1);
  EXPECT_EQ(a.entries[2].n_prb, 73);
  EXPECT_TRUE(a.disjoint());
  EXPECT_EQ(a.used_prbs(), 273);
}

TEST(Scheduler, PfOrderAndTieBreak) {
  PfState pf(3, 100.0);
  pf.avg = {10.0, 5.0, 5.0};
  std::vector<Candidate> c{fixed(2, PriorityClass::XrNew, 50.0, 10), fixed(0, PriorityClass::XrNew, 50.0, 10),
                           fixed(1, PriorityClass::XrNew, 50.0, 10)};
  const auto a = schedule_slot(c, pf, 0, SlotType::D, 273, 13);
  ASSERT_EQ(a.entries.size(), 3u);
  EXPECT_EQ(a.entries[0].flow, 1);  // equal metric with flow 2, lower id wins
  EXPECT_EQ(a.entries[1].flow, 2);
  EXPECT_EQ(a.entries[2].flow, 0);
}

TEST(Scheduler, OneTbPerFlowAndNothingInUplink) {
  PfState pf(1, 100.0);
  std::vector<Candidate> c{fixed(0, PriorityClass::XrRetx, 1.0, 10), fixed(0, PriorityClass::XrNew, 1.0, 10)};
  EXPECT_EQ(schedule_slot(c, pf, 0, SlotType::D, 273, 13).entries.size(), 1u);
  EXPECT_TRUE(schedule_slot(c, pf, 4, SlotType::U, 273, 0).entries.empty());
}

TEST(Scheduler, OversizedGrantIsALogicError) {
  PfState pf(1, 100.0);
  Candidate bad;
  bad.flow = 0;
  bad.grant = [](int max_prb) -> std::optional<Grant> { return Grant{max_prb + 1, 0, 10}; };
  EXPECT_THROW(schedule_slot({bad}, pf, 0, SlotType::D, 273, 13), std::logic_error);
}

TEST(Scheduler, PfAverageIsGeometricSeries) {
  PfState pf(1, 100.0, 1e-9);
  pf.avg[0] = 0.0;
  for (int i = 0; i < 250; ++i) pf_update(pf, {1000.0});
  EXPECT_NEAR(pf.avg[0], 1000.0 * (1.0 - std::pow(0.99, 250)), 1e-6);
  EXPECT_THROW(pf_update(pf, {1.0, 2.0}), std::invalid_argument);
}

TEST(Scheduler, PfFloorKeepsMetricFinite) {
  PfState pf(1, 100.0);
  for (int i = 0; i < 5000; ++i) pf_update(pf, {0.0});
  EXPECT_DOUBLE_EQ(pf.avg[0], 1.0);
  EXPECT_TRUE(std::isfinite(pf.metric(0, 5.0)));
}

// Symbol timeline worked by hand for DDDSU with 10 DL symbols in S, 6
// symbols UE processing and 2.75 symbols gNB processing.
TEST(Timing, FeedbackReadySlots) {
  const FrameClock clk(default_config());
  EXPECT_EQ(clk.tx_end_symbol(0), 14);
  EXPECT_EQ(clk.tx_end_symbol(3), 52);
  EXPECT_THROW(clk.tx_end_symbol(4), std::invalid_argument);
  EXPECT_EQ(clk.feedback_symbol(clk.ue_ready_symbol(14)), 54);
  EXPECT_EQ(clk.gnb_action_slot(54), 5);
  EXPECT_EQ(clk.feedback_symbol(clk.ue_ready_symbol(52)), 58);
  EXPECT_EQ(clk.gnb_action_slot(58), 5);
  EXPECT_EQ(clk.feedback_symbol(clk.ue_ready_symbol(52) + clk.ue_proc_symbols()), 64);
  EXPECT_EQ(clk.feedback_symbol(clk.ue_ready_symbol(clk.tx_end_symbol(5))), 124);
  EXPECT_EQ(clk.gnb_action_slot(124), 10);
  EXPECT_NEAR(clk.symbol_to_ms(14), 0.5, 1e-12);
}

TEST(Timing, PatternWithoutUplinkThrows) {
  auto cfg = default_config();
  cfg.tdd_pattern = "DDDD";
  const FrameClock clk(cfg);
  EXPECT_THROW(clk.next_ul_symbol(0), std::logic_error);
}
