#pragma once

// Scalar channel abstraction: large-scale pathloss and LOS probability for the
// indoor-office and urban-macro model families, per-link shadowing, an AR(1)
// fading process in dB, and SINR from an interference snapshot.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

#include "xrtgr/config.hpp"
#include "xrtgr/rng.hpp"

namespace xrtgr {

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) {
  return lin > 0.0 ? 10.0 * std::log10(lin) : -std::numeric_limits<double>::infinity();
}

struct LinkGeometry {
  double d2d_m{0.0};
  double d3d_m{0.0};
  double h_bs_m{3.0};
  double h_ut_m{1.5};
};

namespace pathloss {

constexpr double kSpeedOfLight = 299792458.0;

// Indoor office (LOS / NLOS), valid for d3D >= 1 m.
inline double inh(double d3d, double fc_hz, bool los) {
  const double fc = fc_hz / 1e9;
  const double pl_los = 32.4 + 17.3 * std::log10(d3d) + 20.0 * std::log10(fc);
  if (los) return pl_los;
  const double pl_nlos = 38.3 * std::log10(d3d) + 17.30 + 24.9 * std::log10(fc);
  return std::max(pl_los, pl_nlos);
}

// Urban macro with effective environment height 1 m.
inline double uma(const LinkGeometry& g, double fc_hz, bool los) {
  const double fc = fc_hz / 1e9;
  const double h_bs_eff = g.h_bs_m - 1.0;
  const double h_ut_eff = g.h_ut_m - 1.0;
  const double d_bp = 4.0 * h_bs_eff * h_ut_eff * fc_hz / kSpeedOfLight;
  double pl_los;
  if (g.d2d_m <= d_bp) {
    pl_los = 28.0 + 22.0 * std::log10(g.d3d_m) + 20.0 * std::log10(fc);
  } else {
    pl_los = 28.0 + 40.0 * std::log10(g.d3d_m) + 20.0 * std::log10(fc) -
             9.0 * std::log10(d_bp * d_bp + (g.h_bs_m - g.h_ut_m) * (g.h_bs_m - g.h_ut_m));
  }
  if (los) return pl_los;
  const double pl_nlos = 13.54 + 39.08 * std::log10(g.d3d_m) + 20.0 * std::log10(fc) - 0.6 * (g.h_ut_m - 1.5);
  return std::max(pl_los, pl_nlos);
}

}  // namespace pathloss

inline double pathloss_db(const LinkGeometry& g, Deployment dep, bool los, double fc_hz) {
  if (!(g.d3d_m > 0.0)) throw std::invalid_argument("pathloss_db: distance must be positive");
  return dep == Deployment::InH ? pathloss::inh(g.d3d_m, fc_hz, los) : pathloss::uma(g, fc_hz, los);
}

/// LOS probability vs 2D distance. Indoor uses the open-office curve.
inline double los_probability(Deployment dep, double d2d, double h_ut = 1.5) {
  if (d2d < 0.0) d2d = 0.0;
  if (dep == Deployment::InH) {
    if (d2d <= 5.0) return 1.0;
    if (d2d <= 49.0) return std::exp(-(d2d - 5.0) / 70.8);
    return std::exp(-(d2d - 49.0) / 211.7) * 0.54;
  }
  if (d2d <= 18.0) return 1.0;
  const double c = h_ut <= 13.0 ? 0.0 : std::pow((h_ut - 13.0) / 10.0, 1.5);
  const double base = 18.0 / d2d + std::exp(-d2d / 63.0) * (1.0 - 18.0 / d2d);
  const double p = base * (1.0 + c * 1.25 * std::pow(d2d / 100.0, 3.0) * std::exp(-d2d / 150.0));
  return std::clamp(p, 0.0, 1.0);
}

inline double shadowing_sigma_db(Deployment dep, bool los) {
  if (dep == Deployment::InH) return los ? 3.0 : 8.03;
  return los ? 4.0 : 6.0;
}

/// Sector antenna element pattern (dB, including 8 dBi element gain) for a
/// horizontal offset angle and zenith angle in degrees, 12 degree downtilt.
inline double sector_antenna_gain_db(double phi_deg, double theta_deg) {
  const double a_h = -std::min(12.0 * (phi_deg / 65.0) * (phi_deg / 65.0), 30.0);
  const double a_v = -std::min(12.0 * ((theta_deg - 102.0) / 65.0) * ((theta_deg - 102.0) / 65.0), 30.0);
  return -std::min(-(a_h + a_v), 30.0) + 8.0;
}

inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

/// Coherence time for a given speed and carrier (0.423 / max Doppler).
inline double coherence_time_ms(double speed_kmh, double carrier_hz) {
  const double v = speed_kmh / 3.6;
  const double f_d = v * carrier_hz / pathloss::kSpeedOfLight;
  if (f_d <= 0.0) return std::numeric_limits<double>::infinity();
  return 1000.0 * 0.423 / f_d;
}

/// First-order Gauss-Markov process in dB, stationary with the configured
/// variance. Started from its stationary distribution.
class FadingProcess {
 public:
  FadingProcess() = default;
  FadingProcess(double variance_db2, double coherence_ms, double step_ms, RngStream rng)
      : sigma_(std::sqrt(std::max(variance_db2, 0.0))),
        rho_(std::isinf(coherence_ms) ? 1.0 : std::exp(-step_ms / coherence_ms)),
        rng_(rng) {
    value_ = sigma_ > 0.0 ? sigma_ * rng_.normal() : 0.0;
  }

  double value() const { return value_; }
  double rho() const { return rho_; }

  double step() {
    if (sigma_ == 0.0) return value_ = 0.0;
    value_ = rho_ * value_ + sigma_ * std::sqrt(1.0 - rho_ * rho_) * rng_.normal();
    return value_;
  }

 private:
  double sigma_{0.0};
  double rho_{1.0};
  double value_{0.0};
  RngStream rng_;
};

struct Interferer {
  double power_mw{0.0};
  double overlap{0.0};  // fraction of the victim allocation the interferer occupies
};

/// SINR (dB) = S / (sum overlap_k * I_k + N).
inline double compute_sinr_db(double signal_mw, std::span<const Interferer> interferers, double noise_mw) {
  double i = 0.0;
  for (const auto& k : interferers) i += k.power_mw * std::clamp(k.overlap, 0.0, 1.0);
  return lin_to_db(signal_mw / (i + noise_mw));
}

}  // namespace xrtgr
