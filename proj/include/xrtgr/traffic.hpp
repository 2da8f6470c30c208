#pragma once

// XR video frame arrivals and full-buffer eMBB demand.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "xrtgr/config.hpp"
#include "xrtgr/rng.hpp"

namespace xrtgr {

/// Rejection sampling; the truncation used for frame sizes and jitter is mild
/// so the acceptance rate stays near one.
inline double sample_trunc_gauss(const TruncGaussParams& p, RngStream& rng) {
  if (!(p.sigma > 0.0) || !(p.a < p.b)) throw std::invalid_argument("invalid truncated Gaussian parameters");
  for (int i = 0; i < 1'000'000; ++i) {
    const double v = rng.normal(p.mu, p.sigma);
    if (v >= p.a && v <= p.b) return v;
  }
  throw std::runtime_error("truncated Gaussian rejection sampling failed");
}

struct XrFrame {
  std::int64_t id{0};
  int flow{0};
  double arrival_ms{0.0};
  long size_bits{0};
  double deadline_ms{0.0};
  long sent_bits{0};  // handed to transport blocks
  long delivered_bits{0};
  long lost_bits{0};  // dropped TBs or discarded at the deadline
  double completion_ms{std::numeric_limits<double>::quiet_NaN()};

  bool completed() const { return !std::isnan(completion_ms); }
  bool on_time() const { return completed() && completion_ms <= deadline_ms; }
  double delay_ms() const {
    return completed() ? completion_ms - arrival_ms : std::numeric_limits<double>::infinity();
  }
};

/// Per-flow frame generator. Frame k arrives at offset + k / fps + jitter.
class XrFlowGenerator {
 public:
  XrFlowGenerator(const ScenarioConfig& cfg, int flow, std::uint64_t seed)
      : flow_(flow),
        period_ms_(1000.0 / cfg.frame_rate_fps),
        pdb_ms_(cfg.pdb_ms),
        size_(cfg.frame_size_kb),
        jitter_(cfg.jitter_ms),
        rng_(seed, entity_id(EntityKind::Flow, static_cast<std::uint64_t>(flow)), Purpose::Traffic) {
    offset_ms_ = cfg.xr_random_offset ? rng_.uniform(0.0, period_ms_) : 0.0;
  }

  double offset_ms() const { return offset_ms_; }

  XrFrame next_frame(std::int64_t frame_index) {
    XrFrame f;
    f.id = frame_index;
    f.flow = flow_;
    const double jitter = sample_trunc_gauss(jitter_, rng_);
    f.arrival_ms = std::max(0.0, offset_ms_ + frame_index * period_ms_ + jitter);
    f.size_bits = std::lround(sample_trunc_gauss(size_, rng_) * 8.0 * 1000.0);
    f.deadline_ms = f.arrival_ms + pdb_ms_;
    return f;
  }

  /// Number of frames whose nominal slot lies inside the horizon.
  std::int64_t frames_in(double horizon_ms) const {
    return static_cast<std::int64_t>(std::ceil((horizon_ms - offset_ms_) / period_ms_ - 1e-9));
  }

 private:
  int flow_;
  double period_ms_;
  double pdb_ms_;
  TruncGaussParams size_;
  TruncGaussParams jitter_;
  RngStream rng_;
  double offset_ms_{0.0};
};

/// Full-buffer demand: never empty.
struct EmbbDemand {
  long long served_bits{0};
  static constexpr bool backlogged() { return true; }
  static constexpr long long pending_bits() { return std::numeric_limits<long long>::max() / 4; }
  void serve(long long bits) { served_bits += bits; }
};

}  // namespace xrtgr
