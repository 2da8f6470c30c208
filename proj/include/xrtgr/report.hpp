#pragma once

// CSV and JSON writers. Number formatting is fixed so identical results give
// byte-identical files.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrtgr/config.hpp"
#include "xrtgr/kpi.hpp"
#include "xrtgr/results.hpp"
#include "xrtgr/sweep.hpp"

namespace xrtgr {

/// Shortest text that reads back to the same double; "inf"/"nan" for
/// non-finite values.
inline std::string fmt_exact(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string fmt_fixed(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// KPI tables

inline void write_capacity_csv(std::ostream& os, const SweepResult& r) {
  os << "scheme,csi_mode,pdb_ms,users_per_cell,satisfied_fraction,capacity_flag\n";
  for (const auto& c : r.cells) {
    os << c.scheme << ',' << to_string(c.csi) << ',' << fmt_fixed(c.pdb_ms, 1) << ',' << c.users_per_cell << ','
       << fmt_fixed(c.summary.satisfied_fraction) << ',' << (c.summary.satisfied_fraction >= kSatisfiedUserTarget ? 1 : 0)
       << '\n';
  }
}

inline void write_capacity_summary_csv(std::ostream& os, const SweepResult& r) {
  os << "scheme,csi_mode,pdb_ms,capacity,capacity_interp\n";
  for (const auto& c : r.curves)
    os << c.scheme << ',' << to_string(c.csi) << ',' << fmt_fixed(c.curve.pdb_ms, 1) << ',' << c.curve.capacity << ','
       << fmt_fixed(c.curve.capacity_interp, 3) << '\n';
}

inline void write_delay_csv(std::ostream& os, const SweepResult& r) {
  os << "scheme,users_per_cell,p50_ms,p99_ms,pdb_ms\n";
  for (const auto& c : r.cells)
    os << c.scheme << ',' << c.users_per_cell << ',' << fmt_fixed(c.summary.delay_p50_ms) << ','
       << fmt_fixed(c.summary.delay_p99_ms) << ',' << fmt_fixed(c.pdb_ms, 1) << '\n';
}

inline void write_prb_csv(std::ostream& os, const SweepResult& r) {
  os << "scheme,cell,mean_load,users_per_cell,pdb_ms\n";
  for (const auto& c : r.cells)
    for (std::size_t i = 0; i < c.summary.cell_prb_load.size(); ++i)
      os << c.scheme << ',' << i << ',' << fmt_fixed(c.summary.cell_prb_load[i]) << ',' << c.users_per_cell << ','
         << fmt_fixed(c.pdb_ms, 1) << '\n';
}

inline void write_embb_csv(std::ostream& os, const SweepResult& r) {
  os << "scheme,user,mbps,users_per_cell,pdb_ms\n";
  for (const auto& c : r.cells)
    for (std::size_t i = 0; i < c.summary.embb_mbps.size(); ++i)
      os << c.scheme << ',' << i << ',' << fmt_fixed(c.summary.embb_mbps[i]) << ',' << c.users_per_cell << ','
         << fmt_fixed(c.pdb_ms, 1) << '\n';
}

/// One line per generated frame; `counted` marks the KPI window.
inline void write_frame_log_csv(std::ostream& os, const std::vector<DropResult>& drops) {
  os << "drop,flow,cell,frame,arrival_ms,size_bits,deadline_ms,delivered_bits,completion_ms,counted\n";
  for (std::size_t d = 0; d < drops.size(); ++d) {
    const auto& dr = drops[d];
    for (std::size_t f = 0; f < dr.frames.size(); ++f)
      for (const auto& fr : dr.frames[f])
        os << d << ',' << f << ',' << dr.flow_cell[f] << ',' << fr.id << ',' << fmt_exact(fr.arrival_ms) << ','
           << fr.size_bits << ',' << fmt_exact(fr.deadline_ms) << ',' << fr.delivered_bits << ','
           << fmt_exact(fr.completion_ms) << ',' << (in_kpi_window(fr, dr.warmup_ms, dr.duration_ms) ? 1 : 0)
           << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  auto tn = [](const TruncGaussParams& p) { return json{{"mu", p.mu}, {"sigma", p.sigma}, {"min", p.a}, {"max", p.b}}; };
  return json{
      {"deployment", to_string(c.deployment)},
      {"cells", c.cells},
      {"inter_site_distance_m", c.inter_site_distance_m},
      {"gnb_power_dbm", c.gnb_power_dbm},
      {"gnb_height_m", c.gnb_height_m},
      {"area_x_m", c.area_x_m},
      {"area_y_m", c.area_y_m},
      {"indoor_probability", c.indoor_probability},
      {"floors", c.floors},
      {"bandwidth_hz", c.bandwidth_hz},
      {"carrier_hz", c.carrier_hz},
      {"scs_hz", c.scs_hz},
      {"tdd_pattern", c.tdd_pattern},
      {"users_per_cell", c.users_per_cell},
      {"user_mode", to_string(c.user_mode)},
      {"coop_scheme", to_string(c.coop_scheme)},
      {"csi_mode", to_string(c.csi_mode)},
      {"cb_mode", to_string(c.cb_mode)},
      {"limited_cb", {{"variant", to_string(c.limited_cb.variant)}, {"fraction", c.limited_cb.fraction}}},
      {"target_bler", c.target_bler},
      {"olla",
       {{"init_offset_db", c.olla.init_offset_db},
        {"delta_up_db", c.olla.delta_up_db},
        {"delta_down_db", c.olla.delta_down_db},
        {"min_offset_db", c.olla.min_offset_db},
        {"max_offset_db", c.olla.max_offset_db}}},
      {"pdb_ms", c.pdb_ms},
      {"xr_rate_mbps", c.xr_rate_mbps},
      {"frame_rate_fps", c.frame_rate_fps},
      {"frame_size_kb", tn(c.frame_size_kb)},
      {"jitter_ms", tn(c.jitter_ms)},
      {"embb_users_per_cell", c.embb_users_per_cell},
      {"sim_duration_s", c.sim_duration_s},
      {"warmup_ms", c.warmup_ms},
      {"drops", c.drops},
      {"seed", c.seed},
      {"intra_tgr_distance_m", c.intra_tgr_distance_m},
      {"channel",
       {{"beamforming_gain_db", c.channel.beamforming_gain_db},
        {"interference_gain_db", c.channel.interference_gain_db},
        {"fading_variance_db2", c.channel.fading_variance_db2},
        {"noise_figure_db", c.channel.noise_figure_db},
        {"shadowing_correlation", c.channel.shadowing_correlation},
        {"los_correlation", c.channel.los_correlation}}},
      {"blep", {{"mode", to_string(c.blep.mode)}, {"slope_db", c.blep.slope_db}, {"snr_gap_db", c.blep.snr_gap_db}}},
      {"harq", {{"max_retransmissions", c.harq.max_retransmissions}, {"processes", c.harq.processes}}},
  };
}

inline nlohmann::json to_json(const CampaignSummary& s) {
  using nlohmann::json;
  json scen = json::array();
  for (int i = 1; i <= 9; ++i) scen.push_back(s.scenario_counts[i]);
  const auto ps = propagation_histogram(s.propagation_status);
  return json{
      {"xr_users", s.xr_users},
      {"satisfied_users", s.satisfied_users},
      {"satisfied_fraction", s.satisfied_fraction},
      {"satisfied_ci95", {s.satisfied_ci.lo, s.satisfied_ci.hi}},
      {"delay_p50_ms", std::isinf(s.delay_p50_ms) ? json("inf") : json(s.delay_p50_ms)},
      {"delay_p99_ms", std::isinf(s.delay_p99_ms) ? json("inf") : json(s.delay_p99_ms)},
      {"prb_load_median", s.prb_load_median},
      {"prb_load_mean", s.prb_load_mean},
      {"max_mcs_fraction", s.max_mcs_fraction},
      {"embb_median_mbps", s.embb_median_mbps},
      {"xr_initial_tx", s.xr_initial_tx},
      {"xr_retx", s.xr_retx},
      {"xr_tb_dropped", s.xr_tb_dropped},
      {"initial_bler", s.initial_bler},
      {"scenario_counts", scen},
      {"propagation_status", {{"both_los", ps[0]}, {"x_los_only", ps[1]}, {"t_los_only", ps[2]}, {"both_nlos", ps[3]}}},
      {"tether_bits", {{"decoded", s.tether.decoded_bits}, {"soft", s.tether.soft_bits}, {"index", s.tether.index_bits}}},
  };
}

inline nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& c : r.curves)
    curves.push_back({{"scheme", c.scheme},
                      {"csi_mode", to_string(c.csi)},
                      {"pdb_ms", c.curve.pdb_ms},
                      {"capacity", c.curve.capacity},
                      {"capacity_interp", c.curve.capacity_interp}});
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    auto j = to_json(c.summary);
    j["scheme"] = c.scheme;
    j["pdb_ms"] = c.pdb_ms;
    j["users_per_cell"] = c.users_per_cell;
    cells.push_back(std::move(j));
  }
  return {{"capacity", curves}, {"points", cells}};
}

}  // namespace xrtgr
