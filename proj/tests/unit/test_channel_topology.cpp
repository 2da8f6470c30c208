#include <gtest/gtest.h>

#include <cmath>

#include "xrtgr/channel.hpp"
#include "xrtgr/topology.hpp"

using namespace xrtgr;

TEST(Pathloss, InhLosHandValue) {
  LinkGeometry g{10.0, 10.0, 3.0, 1.5};
  EXPECT_NEAR(pathloss_db(g, Deployment::InH, true, 4e9), 61.74119982655925, 1e-9);
}

TEST(Pathloss, InhNlosIsAtLeastLos) {
  const double d3d = std::hypot(20.0, 1.5);
  LinkGeometry g{20.0, d3d, 3.0, 1.5};
  EXPECT_NEAR(pathloss_db(g, Deployment::InH, false, 4e9), 82.1673931946322, 1e-9);
  for (double d = 1.0; d < 150.0; d += 3.7) {
    LinkGeometry h{d, d, 3.0, 1.5};
    EXPECT_GE(pathloss_db(h, Deployment::InH, false, 4e9), pathloss_db(h, Deployment::InH, true, 4e9));
    EXPECT_GE(pathloss_db(h, Deployment::DU, false, 4e9), pathloss_db(h, Deployment::DU, true, 4e9));
  }
}

TEST(Pathloss, RejectsZeroDistance) {
  EXPECT_THROW(pathloss_db(LinkGeometry{0.0, 0.0, 3.0, 1.5}, Deployment::InH, true, 4e9), std::invalid_argument);
}

TEST(Channel, NoisePower) { EXPECT_NEAR(noise_power_dbm(100e6, 9.0), -85.0, 1e-12); }

TEST(Channel, LosProbabilityShape) {
  EXPECT_DOUBLE_EQ(los_probability(Deployment::InH, 3.0), 1.0);
  EXPECT_NEAR(los_probability(Deployment::InH, 20.0), std::exp(-15.0 / 70.8), 1e-12);
  EXPECT_DOUBLE_EQ(los_probability(Deployment::DU, 10.0), 1.0);
  for (double d = 1.0; d < 500.0; d += 10.0) {
    EXPECT_LE(los_probability(Deployment::DU, d + 10.0), los_probability(Deployment::DU, d) + 1e-12);
  }
}

TEST(Channel, SinrWithoutInterferenceIsSnr) {
  EXPECT_NEAR(compute_sinr_db(db_to_lin(-70.0), {}, db_to_lin(-85.0)), 15.0, 1e-9);
  std::vector<Interferer> i{{db_to_lin(-85.0), 1.0}};
  EXPECT_NEAR(compute_sinr_db(db_to_lin(-70.0), i, db_to_lin(-85.0)), 15.0 - 10.0 * std::log10(2.0), 1e-9);
  i[0].overlap = 0.0;
  EXPECT_NEAR(compute_sinr_db(db_to_lin(-70.0), i, db_to_lin(-85.0)), 15.0, 1e-9);
}

TEST(Channel, FadingIsStationaryWithConfiguredVariance) {
  FadingProcess f(3.0, coherence_time_ms(3.0, 4e9), 0.5, RngStream(5));
  double s = 0.0, s2 = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double v = f.step();
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 0.0, 0.1);
  EXPECT_NEAR(s2 / n - mean * mean, 3.0, 0.2);
  EXPECT_GT(f.rho(), 0.9);
}

TEST(Channel, ZeroVarianceFadingIsFlat) {
  FadingProcess f(0.0, 10.0, 0.5, RngStream(1));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(f.step(), 0.0);
}

TEST(Topology, InhCountsAndTetherDistance) {
  auto cfg = default_config();
  cfg.users_per_cell = 3;
  cfg.embb_users_per_cell = 1;
  const auto t = generate_drop(cfg, 11);
  ASSERT_EQ(t.cells.size(), 12u);
  ASSERT_EQ(t.groups.size(), 36u);
  ASSERT_EQ(t.embb_ues.size(), 12u);
  std::vector<int> per_cell(12, 0);
  for (const auto& g : t.groups) {
    ++per_cell[g.cell];
    ASSERT_TRUE(g.ue_t.has_value());
    EXPECT_NEAR(distance(g.ue_x.pos, g.ue_t->pos), cfg.intra_tgr_distance_m, 1e-9);
    EXPECT_EQ(g.ue_t->serving_cell, g.cell);
    EXPECT_EQ(g.ue_x.id, xr_ue_id(g.id));
    EXPECT_EQ(g.ue_t->id, tether_ue_id(g.id));
  }
  for (int n : per_cell) EXPECT_EQ(n, 3);
}

TEST(Topology, LegacyGroupsHaveNoTether) {
  auto cfg = default_config();
  cfg.user_mode = UserMode::LegacyXR;
  cfg.coop_scheme = CoopScheme::None;
  cfg.users_per_cell = 2;
  for (const auto& g : generate_drop(cfg, 3).groups) EXPECT_FALSE(g.ue_t.has_value());
}

TEST(Topology, DeterministicPerSeed) {
  auto cfg = default_config();
  cfg.users_per_cell = 2;
  const auto a = generate_drop(cfg, 42), b = generate_drop(cfg, 42), c = generate_drop(cfg, 43);
  ASSERT_EQ(a.groups.size(), b.groups.size());
  for (std::size_t i = 0; i < a.groups.size(); ++i) {
    EXPECT_EQ(a.groups[i].ue_x.pos.x, b.groups[i].ue_x.pos.x);
    EXPECT_EQ(a.groups[i].ue_x.rx_power_dbm, b.groups[i].ue_x.rx_power_dbm);
  }
  EXPECT_NE(a.groups[0].ue_x.pos.x, c.groups[0].ue_x.pos.x);
}

TEST(Topology, EmptyLoad) {
  auto cfg = default_config();
  cfg.users_per_cell = 0;
  EXPECT_TRUE(generate_drop(cfg, 1).groups.empty());
}

TEST(Topology, DuHas21SectorsAndIndoorShare) {
  auto cfg = default_config(Deployment::DU);
  cfg.users_per_cell = 10;
  const auto t = generate_drop(cfg, 9);
  ASSERT_EQ(t.cells.size(), 21u);
  int indoor = 0;
  for (const auto& g : t.groups) {
    indoor += g.ue_x.indoor ? 1 : 0;
    for (const auto& c : t.cells) EXPECT_GE(distance(g.ue_x.pos, c.pos), cfg.min_distance_m - 1e-9);
  }
  EXPECT_NEAR(static_cast<double>(indoor) / t.groups.size(), 0.8, 0.08);
}

TEST(Topology, ReducedInhGrid) {
  auto cfg = default_config();
  cfg.cells = 2;
  cfg.users_per_cell = 2;
  const auto t = generate_drop(cfg, 1);
  ASSERT_EQ(t.cells.size(), 2u);
  EXPECT_NEAR(distance(t.cells[0].pos, t.cells[1].pos), cfg.inter_site_distance_m, 1e-9);
  EXPECT_EQ(t.groups.size(), 4u);
}

TEST(Rng, StreamsAreKeyed) {
  RngStream a(1, entity_id(EntityKind::Ue, 0), Purpose::Decode);
  RngStream b(1, entity_id(EntityKind::Ue, 0), Purpose::Decode);
  RngStream c(1, entity_id(EntityKind::Ue, 0), Purpose::Fading);
  const double x = a.uniform();
  EXPECT_EQ(x, b.uniform());
  EXPECT_NE(x, c.uniform());
}
