#pragma once

// Scenario configuration: the documented key set, defaults, YAML loading and
// validation.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <yaml-cpp/yaml.h>

namespace xrtgr {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Deployment { InH, DU };
enum class UserMode { LegacyXR, TGr };
enum class CoopScheme { None, SCS, SSCS };
enum class CsiMode { UEX, Best };
enum class CbMode { TB, CBG };
enum class LimitedCbVariant { None, CBsUEX, CBsUET };
enum class BlepMode { Parametric, FileLUT };
enum class DuAreaPreset { Table, Text };

inline const char* to_string(Deployment d) { return d == Deployment::InH ? "InH" : "DU"; }
inline const char* to_string(UserMode m) { return m == UserMode::TGr ? "TGr" : "LegacyXR"; }
inline const char* to_string(CoopScheme s) {
  switch (s) {
    case CoopScheme::SCS: return "SCS";
    case CoopScheme::SSCS: return "SSCS";
    default: return "none";
  }
}
inline const char* to_string(CsiMode m) { return m == CsiMode::UEX ? "UEX" : "Best"; }
inline const char* to_string(CbMode m) { return m == CbMode::CBG ? "CBG" : "TB"; }
inline const char* to_string(LimitedCbVariant v) {
  switch (v) {
    case LimitedCbVariant::CBsUEX: return "CBsUEX";
    case LimitedCbVariant::CBsUET: return "CBsUET";
    default: return "none";
  }
}
inline const char* to_string(BlepMode m) { return m == BlepMode::FileLUT ? "lut" : "parametric"; }

struct TruncGaussParams {
  double mu{0.0};
  double sigma{1.0};
  double a{-1.0};
  double b{1.0};
};

struct OllaConfig {
  double init_offset_db{0.0};
  double delta_up_db{0.5};
  double delta_down_db{0.5 * 0.1 / 0.9};
  double min_offset_db{-10.0};
  double max_offset_db{10.0};
};

struct LimitedCbConfig {
  LimitedCbVariant variant{LimitedCbVariant::None};
  double fraction{1.0};
};

struct ChannelConfig {
  double shadowing_correlation{0.9};
  double los_correlation{0.9};
  double fading_variance_db2{3.0};
  double beamforming_gain_db{0.0};
  double interference_gain_db{0.0};
  double noise_figure_db{9.0};
  double o2i_loss_db{19.1};
  double ue_height_m{1.5};
  double ue_speed_kmh{3.0};
  bool force_los{false};
};

struct BlepConfig {
  BlepMode mode{BlepMode::Parametric};
  double slope_db{0.5};
  double ref_block_bits{8448.0};
  double snr_gap_db{2.0};
  std::string lut_path;
  double pdcch_shift_db{6.0};
  double pdcch_payload_bits{40.0};
  double combining_loss_db{0.0};
  double per_cb_sinr_variance_db2{1.0};
};

struct HarqConfig {
  int max_retransmissions{3};
  int processes{16};
  int second_feedback_timeout_slots{2};
  double ue_proc_symbols{6.0};
  double gnb_proc_symbols{2.75};
  int llr_bits{8};
};

struct CsiConfig {
  double period_ms{2.0};
  double delay_ms{2.0};
};

struct ScenarioConfig {
  Deployment deployment{Deployment::InH};
  int cells{12};
  double inter_site_distance_m{20.0};
  double gnb_power_dbm{31.0};
  double gnb_height_m{3.0};
  double area_x_m{120.0};
  double area_y_m{50.0};
  DuAreaPreset du_area{DuAreaPreset::Table};
  double indoor_probability{1.0};
  int floors{1};
  double min_distance_m{0.0};
  double bandwidth_hz{100e6};
  double carrier_hz{4e9};
  double scs_hz{30e3};
  std::string tdd_pattern{"DDDSU"};
  int dl_symbols_d{13};
  int dl_symbols_s{10};
  int users_per_cell{7};
  UserMode user_mode{UserMode::TGr};
  CoopScheme coop_scheme{CoopScheme::SSCS};
  CsiMode csi_mode{CsiMode::Best};
  CbMode cb_mode{CbMode::TB};
  int max_cbgs{8};
  LimitedCbConfig limited_cb;
  double target_bler{0.10};
  OllaConfig olla;
  double pdb_ms{10.0};
  double xr_rate_mbps{45.0};
  double frame_rate_fps{60.0};
  TruncGaussParams frame_size_kb{93.0, 10.0, 46.0, 141.0};
  TruncGaussParams jitter_ms{0.0, 2.0, -4.0, 4.0};
  bool xr_random_offset{true};
  int embb_users_per_cell{0};
  double sim_duration_s{9.0};
  double warmup_ms{100.0};
  int drops{10};
  std::uint64_t seed{1};
  double intra_tgr_distance_m{1.0};
  int pf_window_slots{100};
  ChannelConfig channel;
  BlepConfig blep;
  HarqConfig harq;
  CsiConfig csi;

  double slot_ms() const { return 1.0 / (scs_hz / 15e3); }
  long total_slots() const { return std::lround(sim_duration_s * 1000.0 / slot_ms()); }
};

inline double auto_delta_down(double delta_up, double target_bler) {
  return delta_up * target_bler / (1.0 - target_bler);
}

// Deployment presets. The DU box defaults to the parameter-table value; the
// narrower text value is kept as a selectable preset.
inline void apply_deployment_defaults(ScenarioConfig& c) {
  if (c.deployment == Deployment::InH) {
    c.cells = 12;
    c.inter_site_distance_m = 20.0;
    c.gnb_power_dbm = 31.0;
    c.gnb_height_m = 3.0;
    c.area_x_m = 120.0;
    c.area_y_m = 50.0;
    c.indoor_probability = 1.0;
    c.floors = 1;
    c.min_distance_m = 0.0;
    c.channel.beamforming_gain_db = 26.0;
    c.channel.interference_gain_db = 0.0;
  } else {
    c.cells = 21;
    c.inter_site_distance_m = 200.0;
    c.gnb_power_dbm = 51.0;
    c.gnb_height_m = 25.0;
    c.area_x_m = 528.0;
    c.area_y_m = c.du_area == DuAreaPreset::Table ? 460.0 : 60.0;
    c.indoor_probability = 0.8;
    c.floors = 6;
    c.min_distance_m = 35.0;
    c.channel.beamforming_gain_db = 21.0;
    c.channel.interference_gain_db = 0.0;
  }
}

inline ScenarioConfig default_config(Deployment d = Deployment::InH) {
  ScenarioConfig c;
  c.deployment = d;
  apply_deployment_defaults(c);
  return c;
}

inline void validate(const ScenarioConfig& c) {
  auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
  if (!(c.target_bler > 0.0 && c.target_bler < 1.0)) fail("target_bler must satisfy 0 < target_bler < 1");
  if (!(c.olla.delta_up_db > 0.0)) fail("olla.delta_up_db must be > 0");
  if (!(c.olla.delta_down_db > 0.0)) fail("olla.delta_down_db must be > 0");
  if (c.olla.min_offset_db > c.olla.max_offset_db) fail("olla.min_offset_db must be <= olla.max_offset_db");
  auto check_tn = [&](const TruncGaussParams& p, const std::string& name, bool strict_mu) {
    if (!(p.sigma > 0.0)) fail(name + ".sigma must be > 0");
    if (!(p.a < p.b)) fail(name + " bounds must satisfy min < max");
    if (strict_mu && !(p.a < p.mu && p.mu < p.b)) fail(name + " must satisfy min < mu < max");
  };
  check_tn(c.frame_size_kb, "frame_size_kb", true);
  check_tn(c.jitter_ms, "jitter_ms", false);
  if (c.frame_size_kb.a <= 0.0) fail("frame_size_kb.min must be > 0");
  if (c.tdd_pattern.empty() || c.tdd_pattern.find_first_not_of("DSU") != std::string::npos)
    fail("tdd_pattern must be a non-empty sequence of D, S, U");
  if (c.tdd_pattern.find('D') == std::string::npos && c.tdd_pattern.find('S') == std::string::npos)
    fail("tdd_pattern needs at least one downlink-capable slot");
  if (c.tdd_pattern.find('U') == std::string::npos && c.tdd_pattern.find('S') == std::string::npos)
    fail("tdd_pattern needs at least one uplink-capable slot");
  if (c.dl_symbols_d < 1 || c.dl_symbols_d > 14) fail("dl_symbols_d must be in [1,14]");
  if (c.dl_symbols_s < 1 || c.dl_symbols_s > 12) fail("dl_symbols_s must be in [1,12]");
  if (c.users_per_cell < 0) fail("users_per_cell must be >= 0");
  if (c.embb_users_per_cell < 0) fail("embb_users_per_cell must be >= 0");
  if (c.user_mode == UserMode::LegacyXR && c.coop_scheme != CoopScheme::None)
    fail("coop_scheme must be none for LegacyXR users");
  if (c.user_mode == UserMode::TGr && c.coop_scheme == CoopScheme::None)
    fail("coop_scheme must be SCS or SSCS for TGr users");
  if (c.limited_cb.variant != LimitedCbVariant::None) {
    if (c.cb_mode != CbMode::CBG) fail("limited_cb requires cb_mode CBG");
    if (c.coop_scheme != CoopScheme::SSCS) fail("limited_cb requires coop_scheme SSCS");
  }
  if (!(c.limited_cb.fraction > 0.0 && c.limited_cb.fraction <= 1.0)) fail("limited_cb.fraction must be in (0,1]");
  if (c.max_cbgs < 1 || c.max_cbgs > 8) fail("max_cbgs must be in [1,8]");
  if (!(c.pdb_ms > 0.0)) fail("pdb_ms must be > 0");
  if (!(c.frame_rate_fps > 0.0)) fail("frame_rate_fps must be > 0");
  if (!(c.sim_duration_s > 0.0)) fail("sim_duration_s must be > 0");
  if (c.warmup_ms < 0.0) fail("warmup_ms must be >= 0");
  if (c.drops < 1) fail("drops must be >= 1");
  if (!(c.intra_tgr_distance_m > 0.0)) fail("intra_tgr_distance_m must be > 0");
  if (c.intra_tgr_distance_m >= std::min(c.area_x_m, c.area_y_m)) fail("intra_tgr_distance_m exceeds area");
  if (c.pf_window_slots < 1) fail("pf_window_slots must be >= 1");
  if (c.indoor_probability < 0.0 || c.indoor_probability > 1.0) fail("indoor_probability must be in [0,1]");
  if (c.floors < 1) fail("floors must be >= 1");
  if (std::abs(c.channel.shadowing_correlation) > 1.0) fail("channel.shadowing_correlation must be in [-1,1]");
  if (c.channel.los_correlation < 0.0 || c.channel.los_correlation > 1.0) fail("channel.los_correlation must be in [0,1]");
  if (c.channel.fading_variance_db2 < 0.0) fail("channel.fading_variance_db2 must be >= 0");
  if (!(c.blep.slope_db > 0.0)) fail("blep.slope_db must be > 0");
  if (!(c.blep.ref_block_bits > 0.0)) fail("blep.ref_block_bits must be > 0");
  if (c.blep.per_cb_sinr_variance_db2 < 0.0) fail("blep.per_cb_sinr_variance_db2 must be >= 0");
  if (c.blep.mode == BlepMode::FileLUT && c.blep.lut_path.empty()) fail("blep.lut_path required for lut mode");
  if (c.harq.max_retransmissions < 0) fail("harq.max_retransmissions must be >= 0");
  if (c.harq.processes < 1) fail("harq.processes must be >= 1");
  if (c.harq.second_feedback_timeout_slots < 0) fail("harq.second_feedback_timeout_slots must be >= 0");
  if (!(c.csi.period_ms > 0.0) || c.csi.delay_ms < 0.0) fail("csi period must be > 0 and delay >= 0");
  if (c.drops < 1) fail("drops must be >= 1");
  if (c.deployment == Deployment::InH && (c.cells < 1 || c.cells > 12)) fail("cells must be in [1,12] for InH");
  if (c.deployment == Deployment::DU && c.cells != 21) fail("cells must be 21 for DU");
}

namespace detail {

class YamlReader {
 public:
  explicit YamlReader(const YAML::Node& root) : root_(root) {}

  static std::string where(const YAML::Node& n) {
    const auto m = n.Mark();
    if (m.line < 0) return "";
    return " (line " + std::to_string(m.line + 1) + ")";
  }

  // Every key in `node` must be one of `allowed`.
  static void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                         const std::string& prefix) {
    if (!node.IsMap()) throw ConfigError("expected a mapping for '" + prefix + "'" + where(node));
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key))
        throw ConfigError("unknown key '" + prefix + key + "'" + where(kv.first));
    }
  }

  template <typename T>
  static void get(const YAML::Node& node, const char* key, T& out, const std::string& prefix = "") {
    const auto v = node[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("bad value for key '" + prefix + key + "'" + where(v));
    }
  }

 private:
  const YAML::Node& root_;
};

template <typename E>
E parse_enum(const YAML::Node& v, const std::string& key,
             std::initializer_list<std::pair<const char*, E>> options) {
  const auto s = v.as<std::string>();
  for (const auto& [name, value] : options)
    if (s == name) return value;
  throw ConfigError("bad value '" + s + "' for key '" + key + "'" + YamlReader::where(v));
}

inline void read_tn(const YAML::Node& n, TruncGaussParams& p, const std::string& name) {
  YamlReader::check_keys(n, {"mu", "sigma", "min", "max"}, name + ".");
  YamlReader::get(n, "mu", p.mu, name + ".");
  YamlReader::get(n, "sigma", p.sigma, name + ".");
  YamlReader::get(n, "min", p.a, name + ".");
  YamlReader::get(n, "max", p.b, name + ".");
}

}  // namespace detail

/// Build a config from YAML text. Omitted keys take the documented defaults;
/// unknown keys are rejected with their line number.
inline ScenarioConfig parse_config(const std::string& text) {
  using detail::YamlReader;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ScenarioConfig c;
  if (root.IsNull()) {
    apply_deployment_defaults(c);
    validate(c);
    return c;
  }
  YamlReader::check_keys(
      root,
      {"deployment", "cells", "du_area", "inter_site_distance_m", "gnb_power_dbm", "gnb_height_m",
       "indoor_probability", "floors", "bandwidth_hz", "carrier_hz", "scs_hz", "tdd_pattern",
       "dl_symbols_d", "dl_symbols_s", "users_per_cell", "user_mode", "coop_scheme", "csi_mode",
       "cb_mode", "max_cbgs", "limited_cb", "target_bler", "olla", "pdb_ms", "xr_rate_mbps",
       "frame_rate_fps", "frame_size_kb", "jitter_ms", "xr_random_offset", "embb_users_per_cell",
       "sim_duration_s", "warmup_ms", "drops", "seed", "intra_tgr_distance_m", "pf_window_slots",
       "channel", "blep", "harq", "csi"},
      "");

  if (auto v = root["deployment"])
    c.deployment = detail::parse_enum<Deployment>(v, "deployment", {{"InH", Deployment::InH}, {"DU", Deployment::DU}});
  if (auto v = root["du_area"])
    c.du_area = detail::parse_enum<DuAreaPreset>(v, "du_area", {{"table", DuAreaPreset::Table}, {"text", DuAreaPreset::Text}});
  apply_deployment_defaults(c);

  YamlReader::get(root, "cells", c.cells);
  YamlReader::get(root, "inter_site_distance_m", c.inter_site_distance_m);
  YamlReader::get(root, "gnb_power_dbm", c.gnb_power_dbm);
  YamlReader::get(root, "gnb_height_m", c.gnb_height_m);
  YamlReader::get(root, "indoor_probability", c.indoor_probability);
  YamlReader::get(root, "floors", c.floors);
  YamlReader::get(root, "bandwidth_hz", c.bandwidth_hz);
  YamlReader::get(root, "carrier_hz", c.carrier_hz);
  YamlReader::get(root, "scs_hz", c.scs_hz);
  YamlReader::get(root, "tdd_pattern", c.tdd_pattern);
  YamlReader::get(root, "dl_symbols_d", c.dl_symbols_d);
  YamlReader::get(root, "dl_symbols_s", c.dl_symbols_s);
  YamlReader::get(root, "users_per_cell", c.users_per_cell);

  bool coop_given = false;
  if (auto v = root["user_mode"])
    c.user_mode = detail::parse_enum<UserMode>(v, "user_mode", {{"LegacyXR", UserMode::LegacyXR}, {"legacy", UserMode::LegacyXR}, {"TGr", UserMode::TGr}});
  if (auto v = root["coop_scheme"]) {
    coop_given = true;
    c.coop_scheme = detail::parse_enum<CoopScheme>(v, "coop_scheme", {{"none", CoopScheme::None}, {"SCS", CoopScheme::SCS}, {"SSCS", CoopScheme::SSCS}});
  }
  if (!coop_given) c.coop_scheme = c.user_mode == UserMode::LegacyXR ? CoopScheme::None : CoopScheme::SSCS;
  if (auto v = root["csi_mode"])
    c.csi_mode = detail::parse_enum<CsiMode>(v, "csi_mode", {{"UEX", CsiMode::UEX}, {"Best", CsiMode::Best}});
  if (auto v = root["cb_mode"])
    c.cb_mode = detail::parse_enum<CbMode>(v, "cb_mode", {{"TB", CbMode::TB}, {"CBG", CbMode::CBG}});
  YamlReader::get(root, "max_cbgs", c.max_cbgs);
  if (auto n = root["limited_cb"]) {
    YamlReader::check_keys(n, {"variant", "fraction"}, "limited_cb.");
    if (auto v = n["variant"])
      c.limited_cb.variant = detail::parse_enum<LimitedCbVariant>(
          v, "limited_cb.variant", {{"none", LimitedCbVariant::None}, {"CBsUEX", LimitedCbVariant::CBsUEX}, {"CBsUET", LimitedCbVariant::CBsUET}});
    YamlReader::get(n, "fraction", c.limited_cb.fraction, "limited_cb.");
  }

  c.target_bler = c.cb_mode == CbMode::CBG ? 0.30 : 0.10;
  YamlReader::get(root, "target_bler", c.target_bler);

  std::optional<double> delta_down;
  if (auto n = root["olla"]) {
    YamlReader::check_keys(n, {"init_offset_db", "delta_up_db", "delta_down_db", "min_offset_db", "max_offset_db"}, "olla.");
    YamlReader::get(n, "init_offset_db", c.olla.init_offset_db, "olla.");
    YamlReader::get(n, "delta_up_db", c.olla.delta_up_db, "olla.");
    YamlReader::get(n, "min_offset_db", c.olla.min_offset_db, "olla.");
    YamlReader::get(n, "max_offset_db", c.olla.max_offset_db, "olla.");
    if (n["delta_down_db"]) {
      double d = 0.0;
      YamlReader::get(n, "delta_down_db", d, "olla.");
      delta_down = d;
    }
  }
  c.olla.delta_down_db = delta_down ? *delta_down : auto_delta_down(c.olla.delta_up_db, c.target_bler);

  YamlReader::get(root, "pdb_ms", c.pdb_ms);
  YamlReader::get(root, "xr_rate_mbps", c.xr_rate_mbps);
  YamlReader::get(root, "frame_rate_fps", c.frame_rate_fps);
  if (root["frame_size_kb"]) {
    detail::read_tn(root["frame_size_kb"], c.frame_size_kb, "frame_size_kb");
  } else if (c.xr_rate_mbps != 45.0) {
    const double k = c.xr_rate_mbps / 45.0;
    c.frame_size_kb = {93.0 * k, 10.0 * k, 46.0 * k, 141.0 * k};
  }
  if (root["jitter_ms"]) detail::read_tn(root["jitter_ms"], c.jitter_ms, "jitter_ms");
  YamlReader::get(root, "xr_random_offset", c.xr_random_offset);
  YamlReader::get(root, "embb_users_per_cell", c.embb_users_per_cell);
  YamlReader::get(root, "sim_duration_s", c.sim_duration_s);
  YamlReader::get(root, "warmup_ms", c.warmup_ms);
  YamlReader::get(root, "drops", c.drops);
  YamlReader::get(root, "seed", c.seed);
  YamlReader::get(root, "intra_tgr_distance_m", c.intra_tgr_distance_m);
  YamlReader::get(root, "pf_window_slots", c.pf_window_slots);

  if (auto n = root["channel"]) {
    const std::string p = "channel.";
    YamlReader::check_keys(n, {"shadowing_correlation", "los_correlation", "fading_variance_db2", "beamforming_gain_db",
                               "interference_gain_db", "noise_figure_db", "o2i_loss_db", "ue_height_m", "ue_speed_kmh", "force_los"}, p);
    YamlReader::get(n, "shadowing_correlation", c.channel.shadowing_correlation, p);
    YamlReader::get(n, "los_correlation", c.channel.los_correlation, p);
    YamlReader::get(n, "fading_variance_db2", c.channel.fading_variance_db2, p);
    YamlReader::get(n, "beamforming_gain_db", c.channel.beamforming_gain_db, p);
    YamlReader::get(n, "interference_gain_db", c.channel.interference_gain_db, p);
    YamlReader::get(n, "noise_figure_db", c.channel.noise_figure_db, p);
    YamlReader::get(n, "o2i_loss_db", c.channel.o2i_loss_db, p);
    YamlReader::get(n, "ue_height_m", c.channel.ue_height_m, p);
    YamlReader::get(n, "ue_speed_kmh", c.channel.ue_speed_kmh, p);
    YamlReader::get(n, "force_los", c.channel.force_los, p);
  }
  if (auto n = root["blep"]) {
    const std::string p = "blep.";
    YamlReader::check_keys(n, {"mode", "slope_db", "ref_block_bits", "snr_gap_db", "lut_path", "pdcch_shift_db",
                               "pdcch_payload_bits", "combining_loss_db", "per_cb_sinr_variance_db2"}, p);
    if (auto v = n["mode"])
      c.blep.mode = detail::parse_enum<BlepMode>(v, "blep.mode", {{"parametric", BlepMode::Parametric}, {"lut", BlepMode::FileLUT}});
    YamlReader::get(n, "slope_db", c.blep.slope_db, p);
    YamlReader::get(n, "ref_block_bits", c.blep.ref_block_bits, p);
    YamlReader::get(n, "snr_gap_db", c.blep.snr_gap_db, p);
    YamlReader::get(n, "lut_path", c.blep.lut_path, p);
    YamlReader::get(n, "pdcch_shift_db", c.blep.pdcch_shift_db, p);
    YamlReader::get(n, "pdcch_payload_bits", c.blep.pdcch_payload_bits, p);
    YamlReader::get(n, "combining_loss_db", c.blep.combining_loss_db, p);
    YamlReader::get(n, "per_cb_sinr_variance_db2", c.blep.per_cb_sinr_variance_db2, p);
  }
  if (auto n = root["harq"]) {
    const std::string p = "harq.";
    YamlReader::check_keys(n, {"max_retransmissions", "processes", "second_feedback_timeout_slots", "ue_proc_symbols",
                               "gnb_proc_symbols", "llr_bits"}, p);
    YamlReader::get(n, "max_retransmissions", c.harq.max_retransmissions, p);
    YamlReader::get(n, "processes", c.harq.processes, p);
    YamlReader::get(n, "second_feedback_timeout_slots", c.harq.second_feedback_timeout_slots, p);
    YamlReader::get(n, "ue_proc_symbols", c.harq.ue_proc_symbols, p);
    YamlReader::get(n, "gnb_proc_symbols", c.harq.gnb_proc_symbols, p);
    YamlReader::get(n, "llr_bits", c.harq.llr_bits, p);
  }
  if (auto n = root["csi"]) {
    YamlReader::check_keys(n, {"period_ms", "delay_ms"}, "csi.");
    YamlReader::get(n, "period_ms", c.csi.period_ms, "csi.");
    YamlReader::get(n, "delay_ms", c.csi.delay_ms, "csi.");
  }
  validate(c);
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace xrtgr
