#pragma once

// Key performance indicators over drop results.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "xrtgr/results.hpp"

namespace xrtgr {

inline constexpr double kFrameSuccessTarget = 0.99;
inline constexpr double kSatisfiedUserTarget = 0.90;

inline bool user_satisfied(long on_time, long total, double threshold = kFrameSuccessTarget) {
  if (total <= 0) throw std::invalid_argument("user_satisfied: empty frame log");
  return static_cast<double>(on_time) / static_cast<double>(total) >= threshold;
}

inline bool user_satisfied(std::span<const XrFrame> frames, double threshold = kFrameSuccessTarget) {
  long ok = 0;
  for (const auto& f : frames) ok += f.on_time() ? 1 : 0;
  return user_satisfied(ok, static_cast<long>(frames.size()), threshold);
}

struct CapacityPoint {
  int users_per_cell{0};
  double satisfied_fraction{0.0};
};

struct CapacityCurve {
  std::vector<CapacityPoint> points;
  int capacity{0};
  double capacity_interp{0.0};
  double pdb_ms{0.0};
};

/// Largest evaluated load whose satisfied fraction reaches the target. The
/// interpolated value follows the line to the next evaluated load.
inline CapacityCurve xr_capacity(std::vector<CapacityPoint> points, double pdb_ms = 0.0,
                                 double threshold = kSatisfiedUserTarget) {
  if (points.empty()) throw std::invalid_argument("xr_capacity: no load points");
  std::sort(points.begin(), points.end(),
            [](const CapacityPoint& a, const CapacityPoint& b) { return a.users_per_cell < b.users_per_cell; });
  CapacityCurve c;
  c.points = points;
  c.pdb_ms = pdb_ms;
  int best = -1;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].satisfied_fraction >= threshold) best = static_cast<int>(i);
  if (best < 0) return c;
  c.capacity = points[best].users_per_cell;
  c.capacity_interp = c.capacity;
  if (best + 1 < static_cast<int>(points.size())) {
    const auto& a = points[best];
    const auto& b = points[best + 1];
    if (a.satisfied_fraction > b.satisfied_fraction)
      c.capacity_interp = a.users_per_cell + (a.satisfied_fraction - threshold) /
                                                 (a.satisfied_fraction - b.satisfied_fraction) *
                                                 (b.users_per_cell - a.users_per_cell);
  }
  return c;
}

/// Nearest-rank percentile, p in (0, 100]. Infinite entries are allowed.
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("percentile: p must be in (0,100]");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

/// Application delay percentile; undelivered frames count as infinite delay.
inline double delay_percentile(std::span<const XrFrame> frames, double p) {
  std::vector<double> d;
  d.reserve(frames.size());
  for (const auto& f : frames) d.push_back(f.delay_ms());
  return percentile(std::move(d), p);
}

inline double embb_throughput_mbps(double served_bits, double duration_s) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("embb_throughput_mbps: duration must be > 0");
  return served_bits / duration_s / 1e6;
}

inline std::array<double, 9> scenario_histogram(const std::array<long, 10>& counts) {
  std::array<double, 9> h{};
  double total = 0.0;
  for (int s = 1; s <= 9; ++s) total += static_cast<double>(counts[s]);
  if (total <= 0.0) return h;
  for (int s = 1; s <= 9; ++s) h[s - 1] = static_cast<double>(counts[s]) / total;
  return h;
}

inline std::array<double, 4> propagation_histogram(const std::array<long, 4>& counts) {
  std::array<double, 4> h{};
  double total = 0.0;
  for (long c : counts) total += static_cast<double>(c);
  if (total <= 0.0) return h;
  for (int i = 0; i < 4; ++i) h[i] = static_cast<double>(counts[i]) / total;
  return h;
}

struct BinomialCi {
  double estimate{0.0};
  double lo{0.0};
  double hi{0.0};
};

/// Normal-approximation interval, clipped to [0, 1].
inline BinomialCi binomial_ci(long successes, long trials, double z = 1.96) {
  if (trials <= 0) return {};
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  const double h = z * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return {p, std::max(0.0, p - h), std::min(1.0, p + h)};
}

// ---------------------------------------------------------------------------
// Campaign summaries

struct CampaignSummary {
  long xr_users{0};
  long satisfied_users{0};
  double satisfied_fraction{0.0};
  BinomialCi satisfied_ci;
  double delay_p50_ms{0.0};
  double delay_p99_ms{0.0};
  std::vector<double> cell_prb_load;  // per cell and drop
  double prb_load_median{0.0};
  double prb_load_mean{0.0};
  double max_mcs_fraction{0.0};
  std::vector<double> embb_mbps;
  double embb_median_mbps{0.0};
  long xr_initial_tx{0};
  long xr_retx{0};
  long xr_retx_prbs{0};
  long xr_retx_full_tb_prbs{0};
  long xr_tb_dropped{0};
  double initial_bler{0.0};
  std::array<long, 10> scenario_counts{};
  std::array<long, 4> propagation_status{};
  std::array<std::array<long, 4>, 10> retx_causes{};
  TetherVolume tether;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  return percentile(std::move(v), 50.0);
}

/// Satisfaction uses the per-flow counters kept by the engine.
inline CampaignSummary summarize(const std::vector<DropResult>& drops) {
  CampaignSummary s;
  std::vector<double> delays;
  long max_mcs = 0, initial = 0, nack = 0, init_kpi = 0;
  for (const auto& d : drops) {
    for (std::size_t f = 0; f < d.frames.size(); ++f) {
      if (d.flow_counted[f] <= 0) continue;
      ++s.xr_users;
      if (user_satisfied(d.flow_on_time[f], d.flow_counted[f])) ++s.satisfied_users;
      for (const auto& fr : d.frames[f])
        if (in_kpi_window(fr, d.warmup_ms, d.duration_ms)) delays.push_back(fr.delay_ms());
    }
    for (int c = 0; c < d.cells; ++c)
      s.cell_prb_load.push_back(d.cell_dl_slots[c] > 0 ? d.cell_prb_fraction_sum[c] / d.cell_dl_slots[c] : 0.0);
    const double kpi_s = (d.duration_ms - d.warmup_ms) / 1000.0;
    for (double b : d.embb_served_bits) s.embb_mbps.push_back(kpi_s > 0 ? embb_throughput_mbps(b, kpi_s) : 0.0);
    for (int m = 0; m <= kMaxMcs; ++m) initial += d.xr_initial_mcs[m];
    max_mcs += d.xr_initial_mcs[kMaxMcs];
    s.xr_initial_tx += d.xr_initial_tx;
    s.xr_retx += d.xr_retx;
    s.xr_retx_prbs += d.xr_retx_prbs;
    s.xr_retx_full_tb_prbs += d.xr_retx_full_tb_prbs;
    s.xr_tb_dropped += d.xr_tb_dropped;
    init_kpi += d.initial_tx_kpi;
    nack += d.initial_nack_kpi;
    for (int i = 0; i < 10; ++i) {
      s.scenario_counts[i] += d.scenario_counts[i];
      for (int j = 0; j < 4; ++j) s.retx_causes[i][j] += d.retx_causes[i][j];
    }
    for (int i = 0; i < 4; ++i) s.propagation_status[i] += d.propagation_status[i];
    s.tether.decoded_bits += d.tether.decoded_bits;
    s.tether.soft_bits += d.tether.soft_bits;
    s.tether.index_bits += d.tether.index_bits;
  }
  if (s.xr_users > 0) s.satisfied_fraction = static_cast<double>(s.satisfied_users) / static_cast<double>(s.xr_users);
  s.satisfied_ci = binomial_ci(s.satisfied_users, s.xr_users);
  if (!delays.empty()) {
    s.delay_p50_ms = percentile(delays, 50.0);
    s.delay_p99_ms = percentile(std::move(delays), 99.0);
  }
  s.prb_load_median = median_of(s.cell_prb_load);
  if (!s.cell_prb_load.empty()) {
    double sum = 0.0;
    for (double v : s.cell_prb_load) sum += v;
    s.prb_load_mean = sum / static_cast<double>(s.cell_prb_load.size());
  }
  s.embb_median_mbps = median_of(s.embb_mbps);
  s.max_mcs_fraction = initial > 0 ? static_cast<double>(max_mcs) / static_cast<double>(initial) : 0.0;
  s.initial_bler = init_kpi > 0 ? static_cast<double>(nack) / static_cast<double>(init_kpi) : 0.0;
  return s;
}

}  // namespace xrtgr
