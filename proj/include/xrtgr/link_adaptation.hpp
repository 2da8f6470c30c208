#pragma once

// CSI reporting, inner-loop MCS selection and the joint outer-loop link
// adaptation driven by cooperative HARQ feedback.

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "xrtgr/config.hpp"
#include "xrtgr/phy.hpp"

namespace xrtgr {

enum class Harq { ACK, NACK, DTX, ABSENT };

inline const char* to_string(Harq h) {
  switch (h) {
    case Harq::ACK: return "ACK";
    case Harq::NACK: return "NACK";
    case Harq::DTX: return "DTX";
    default: return "-";
  }
}

struct CsiReport {
  double sinr_db{0.0};
  int cqi{1};
  long measured_slot{0};
  long available_slot{0};
};

inline CsiReport make_csi_report(const BlepModel& m, double sinr_db, long measured_slot, long delay_slots) {
  return {sinr_db, m.cqi_from_sinr(sinr_db), measured_slot, measured_slot + delay_slots};
}

/// Reported group SINR: UE-X only, or the better of the two reports.
inline double group_sinr(const std::optional<CsiReport>& csi_x, const std::optional<CsiReport>& csi_t, CsiMode mode) {
  if (!csi_x) throw std::invalid_argument("group_sinr: missing UE-X report");
  if (mode == CsiMode::UEX) return csi_x->sinr_db;
  if (!csi_t) throw std::invalid_argument("group_sinr: missing UE-T report in Best mode");
  return std::max(csi_x->sinr_db, csi_t->sinr_db);
}

struct OllaState {
  double offset_db{0.0};
  double delta_up_db{0.5};
  double delta_down_db{0.5 * 0.1 / 0.9};
  double target_bler{0.1};
  double min_offset_db{-10.0};
  double max_offset_db{10.0};

  static OllaState from_config(const ScenarioConfig& c) {
    return {c.olla.init_offset_db, c.olla.delta_up_db, c.olla.delta_down_db, c.target_bler,
            c.olla.min_offset_db, c.olla.max_offset_db};
  }
};

inline double effective_sinr(double group_sinr_db, const OllaState& olla) { return group_sinr_db - olla.offset_db; }

inline OllaState olla_update(OllaState s, Harq hf_j) {
  if (hf_j == Harq::ACK) s.offset_db -= s.delta_down_db;
  else s.offset_db += s.delta_up_db;
  s.offset_db = std::clamp(s.offset_db, s.min_offset_db, s.max_offset_db);
  return s;
}

/// Highest-rate MCS whose BLEP at this block size meets the target; MCS 0 if
/// none does.
inline int select_mcs(double gamma_eff_db, const BlepModel& m, double target_bler, double tb_bits) {
  for (int mcs = kMaxMcs; mcs > 0; --mcs)
    if (m.blep(gamma_eff_db, mcs, tb_bits) <= target_bler + 1e-12) return mcs;
  return 0;
}

struct JointFeedbackInput {
  Harq hf_x1{Harq::DTX};
  Harq hf_t1{Harq::DTX};
  Harq hf_x2{Harq::ABSENT};
  CoopScheme scheme{CoopScheme::SCS};
};

/// Joint HARQ feedback for the group. The first feedbacks are OR-ed whenever
/// the scheme is selection combining or either of them is an ACK; otherwise
/// the post-combining feedback decides and its absence counts as NACK. DTX is
/// NACK-class. Legacy users (scheme None) only have hf_x1.
inline Harq joint_feedback(const JointFeedbackInput& in) {
  if (in.scheme == CoopScheme::None) return in.hf_x1 == Harq::ACK ? Harq::ACK : Harq::NACK;
  const bool any_ack = in.hf_x1 == Harq::ACK || in.hf_t1 == Harq::ACK;
  if (in.scheme == CoopScheme::SCS || any_ack) return any_ack ? Harq::ACK : Harq::NACK;
  return in.hf_x2 == Harq::ACK ? Harq::ACK : Harq::NACK;
}

}  // namespace xrtgr
