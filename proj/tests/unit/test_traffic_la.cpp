#include <gtest/gtest.h>

#include <cmath>

#include "xrtgr/link_adaptation.hpp"
#include "xrtgr/traffic.hpp"

using namespace xrtgr;

TEST(Traffic, TruncGaussStaysInBounds) {
  RngStream r(1);
  const TruncGaussParams p{93.0, 10.0, 46.0, 141.0};
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = sample_trunc_gauss(p, r);
    ASSERT_GE(v, 46.0);
    ASSERT_LE(v, 141.0);
    s += v;
  }
  EXPECT_NEAR(s / n, 93.0, 0.1);
  EXPECT_THROW(sample_trunc_gauss({0.0, 0.0, -1.0, 1.0}, r), std::invalid_argument);
}

TEST(Traffic, FramesArriveOncePerPeriod) {
  auto cfg = default_config();
  cfg.jitter_ms = {0.0, 1e-9, -1e-9, 1e-9};
  XrFlowGenerator g(cfg, 0, 7);
  const double period = 1000.0 / 60.0;
  for (int k = 0; k < 100; ++k) {
    const auto f = g.next_frame(k);
    EXPECT_NEAR(f.arrival_ms, g.offset_ms() + k * period, 1e-6);
    EXPECT_NEAR(f.deadline_ms - f.arrival_ms, cfg.pdb_ms, 1e-12);
  }
  EXPECT_GE(g.offset_ms(), 0.0);
  EXPECT_LT(g.offset_ms(), period);
}

TEST(Traffic, FrameBookkeeping) {
  XrFrame f;
  f.arrival_ms = 10.0;
  f.deadline_ms = 20.0;
  EXPECT_FALSE(f.completed());
  EXPECT_TRUE(std::isinf(f.delay_ms()));
  f.completion_ms = 19.5;
  EXPECT_TRUE(f.on_time());
  EXPECT_DOUBLE_EQ(f.delay_ms(), 9.5);
  f.completion_ms = 20.5;
  EXPECT_FALSE(f.on_time());
}

TEST(LinkAdaptation, GroupSinr) {
  CsiReport x{5.0, 0, 0, 0}, t{9.0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(group_sinr(x, t, CsiMode::Best), 9.0);
  EXPECT_DOUBLE_EQ(group_sinr(x, t, CsiMode::UEX), 5.0);
  EXPECT_DOUBLE_EQ(group_sinr(x, std::nullopt, CsiMode::UEX), 5.0);
  EXPECT_THROW(group_sinr(std::nullopt, t, CsiMode::Best), std::invalid_argument);
  EXPECT_THROW(group_sinr(x, std::nullopt, CsiMode::Best), std::invalid_argument);
}

TEST(LinkAdaptation, OllaSteps) {
  OllaState s;
  s.offset_db = 1.0;
  EXPECT_DOUBLE_EQ(effective_sinr(12.0, s), 11.0);
  auto up = olla_update(s, Harq::NACK);
  EXPECT_DOUBLE_EQ(up.offset_db, 1.5);
  auto down = olla_update(s, Harq::ACK);
  EXPECT_NEAR(down.offset_db, 1.0 - 0.5 / 9.0, 1e-12);
  EXPECT_DOUBLE_EQ(olla_update(s, Harq::DTX).offset_db, 1.5);
  s.offset_db = 9.9;
  EXPECT_DOUBLE_EQ(olla_update(s, Harq::NACK).offset_db, 10.0);
}

TEST(LinkAdaptation, SelectMcs) {
  const auto m = BlepModel::parametric();
  EXPECT_EQ(select_mcs(60.0, m, 0.1, 8448.0), kMaxMcs);
  EXPECT_EQ(select_mcs(-30.0, m, 0.1, 8448.0), 0);
  EXPECT_EQ(select_mcs(m.gamma_ref(14), m, 0.1, 8448.0), 14);
  EXPECT_EQ(select_mcs(m.gamma_ref(14) - 1e-6, m, 0.1, 8448.0), 13);
  int last = 0;
  for (double s = -10.0; s < 30.0; s += 0.25) {
    const int k = select_mcs(s, m, 0.1, 20000.0);
    EXPECT_GE(k, last);
    last = k;
  }
}

TEST(LinkAdaptation, CsiReportCarriesDelay) {
  const auto m = BlepModel::parametric();
  const auto r = make_csi_report(m, 12.0, 40, 4);
  EXPECT_EQ(r.available_slot, 44);
  EXPECT_EQ(r.cqi, m.cqi_from_sinr(12.0));
}

// Every input combination, checked against the OR / post-combining rule.
TEST(JointFeedback, TruthTable) {
  const Harq first[] = {Harq::ACK, Harq::NACK, Harq::DTX};
  const Harq second[] = {Harq::ACK, Harq::NACK, Harq::ABSENT};
  int cases = 0;
  for (auto scheme : {CoopScheme::SCS, CoopScheme::SSCS})
    for (Harq x1 : first)
      for (Harq t1 : first)
        for (Harq x2 : second) {
          const bool any_ack = x1 == Harq::ACK || t1 == Harq::ACK;
          const bool or_branch = scheme == CoopScheme::SCS || any_ack;
          const bool ack = (or_branch && any_ack) || (!or_branch && x2 == Harq::ACK);
          EXPECT_EQ(joint_feedback({x1, t1, x2, scheme}), ack ? Harq::ACK : Harq::NACK)
              << to_string(scheme) << ' ' << to_string(x1) << ' ' << to_string(t1) << ' ' << to_string(x2);
          ++cases;
        }
  EXPECT_EQ(cases, 54);
}

TEST(JointFeedback, Examples) {
  EXPECT_EQ(joint_feedback({Harq::NACK, Harq::ACK, Harq::ABSENT, CoopScheme::SCS}), Harq::ACK);
  EXPECT_EQ(joint_feedback({Harq::NACK, Harq::NACK, Harq::ACK, CoopScheme::SSCS}), Harq::ACK);
  EXPECT_EQ(joint_feedback({Harq::NACK, Harq::NACK, Harq::ABSENT, CoopScheme::SSCS}), Harq::NACK);
  EXPECT_EQ(joint_feedback({Harq::NACK, Harq::NACK, Harq::ACK, CoopScheme::SCS}), Harq::NACK);
  EXPECT_EQ(joint_feedback({Harq::DTX, Harq::DTX, Harq::ABSENT, CoopScheme::SSCS}), Harq::NACK);
  EXPECT_EQ(joint_feedback({Harq::ACK, Harq::DTX, Harq::ABSENT, CoopScheme::None}), Harq::ACK);
}
