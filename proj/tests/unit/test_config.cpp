#include <gtest/gtest.h>

#include <fstream>

#include "xrtgr/config.hpp"

using namespace xrtgr;

TEST(Config, EmptyDocumentGivesInhDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.deployment, Deployment::InH);
  EXPECT_EQ(c.cells, 12);
  EXPECT_DOUBLE_EQ(c.inter_site_distance_m, 20.0);
  EXPECT_DOUBLE_EQ(c.gnb_power_dbm, 31.0);
  EXPECT_EQ(c.tdd_pattern, "DDDSU");
  EXPECT_DOUBLE_EQ(c.target_bler, 0.1);
  EXPECT_DOUBLE_EQ(c.pdb_ms, 10.0);
  EXPECT_EQ(c.drops, 10);
  EXPECT_DOUBLE_EQ(c.sim_duration_s, 9.0);
  EXPECT_EQ(c.total_slots(), 18000);
  EXPECT_DOUBLE_EQ(c.slot_ms(), 0.5);
}

TEST(Config, DuPresetFillsSiteParameters) {
  const auto c = parse_config("deployment: DU\n");
  EXPECT_EQ(c.cells, 21);
  EXPECT_DOUBLE_EQ(c.inter_site_distance_m, 200.0);
  EXPECT_DOUBLE_EQ(c.gnb_power_dbm, 51.0);
  EXPECT_DOUBLE_EQ(c.gnb_height_m, 25.0);
  EXPECT_DOUBLE_EQ(c.indoor_probability, 0.8);
  EXPECT_DOUBLE_EQ(c.area_y_m, 460.0);
  EXPECT_DOUBLE_EQ(parse_config("deployment: DU\ndu_area: text\n").area_y_m, 60.0);
}

TEST(Config, DeltaDownFollowsTarget) {
  const auto c = parse_config("olla:\n  delta_up_db: 0.5\n");
  EXPECT_NEAR(c.olla.delta_down_db, 0.5 * 0.1 / 0.9, 1e-12);
  const auto g = parse_config("cb_mode: CBG\n");
  EXPECT_DOUBLE_EQ(g.target_bler, 0.3);
  EXPECT_NEAR(g.olla.delta_down_db, 0.5 * 0.3 / 0.7, 1e-12);
  const auto e = parse_config("olla:\n  delta_down_db: 0.2\n");
  EXPECT_DOUBLE_EQ(e.olla.delta_down_db, 0.2);
}

TEST(Config, LegacyUsersHaveNoCooperation) {
  const auto c = parse_config("user_mode: LegacyXR\n");
  EXPECT_EQ(c.coop_scheme, CoopScheme::None);
  EXPECT_THROW(parse_config("user_mode: LegacyXR\ncoop_scheme: SSCS\n"), ConfigError);
  EXPECT_THROW(parse_config("coop_scheme: none\n"), ConfigError);
}

TEST(Config, RejectsOutOfRangeValues) {
  EXPECT_THROW(parse_config("target_bler: 1.0\n"), ConfigError);
  EXPECT_THROW(parse_config("target_bler: 0\n"), ConfigError);
  EXPECT_THROW(parse_config("tdd_pattern: DDDXU\n"), ConfigError);
  EXPECT_THROW(parse_config("tdd_pattern: UUU\n"), ConfigError);
  EXPECT_THROW(parse_config("tdd_pattern: DDDD\n"), ConfigError);
  EXPECT_THROW(parse_config("frame_size_kb: {mu: 200, sigma: 10, min: 46, max: 141}\n"), ConfigError);
  EXPECT_THROW(parse_config("limited_cb: {variant: CBsUEX, fraction: 0.5}\n"), ConfigError);
  EXPECT_THROW(parse_config("cb_mode: CBG\nlimited_cb: {variant: CBsUEX, fraction: 0}\n"), ConfigError);
  EXPECT_THROW(parse_config("cells: 13\n"), ConfigError);
  EXPECT_THROW(parse_config("deployment: DU\ncells: 12\n"), ConfigError);
  EXPECT_NO_THROW(parse_config("cells: 2\n"));
}

TEST(Config, UnknownKeyNamesLine) {
  try {
    parse_config("pdb_ms: 10\nbogus_key: 3\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("bogus_key"), std::string::npos);
    EXPECT_NE(what.find("line 2"), std::string::npos);
  }
}

TEST(Config, BadValueType) { EXPECT_THROW(parse_config("users_per_cell: many\n"), ConfigError); }

TEST(Config, RateScalesFrameSize) {
  const auto c = parse_config("xr_rate_mbps: 30\n");
  EXPECT_NEAR(c.frame_size_kb.mu, 62.0, 1e-9);
  EXPECT_NEAR(c.frame_size_kb.b, 94.0, 1e-9);
}

TEST(Config, MissingFileIsConfigError) { EXPECT_THROW(load_config("/nonexistent/x.yaml"), ConfigError); }

TEST(Config, ShippedScenariosLoad) {
  for (const char* f : {"inh_default", "inh_legacy", "inh_embb", "inh_cbg_limited", "du_default", "inh_small"}) {
    SCOPED_TRACE(f);
    EXPECT_NO_THROW(load_config(std::string(XRTGR_SOURCE_DIR) + "/scenarios/" + f + ".yaml"));
  }
}
