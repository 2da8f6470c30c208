#pragma once

// HARQ processes with chase combining, decode draws, and the cooperation
// resolver of a tethering group (selection combining and selection/soft
// combining) at transport block and code block granularity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "xrtgr/config.hpp"
#include "xrtgr/link_adaptation.hpp"
#include "xrtgr/phy.hpp"

namespace xrtgr {

enum class Relay { None, DecodedTb, SoftTb };
enum class XAction { None, DiscardTb, UseTb, DiscardSoft, SoftCombine };
enum class UsedPath { None, Direct, RelayedTb, SoftCombined };

inline const char* to_string(Relay r) {
  switch (r) {
    case Relay::DecodedTb: return "TB_T";
    case Relay::SoftTb: return "softTB_T";
    default: return "-";
  }
}

inline const char* to_string(XAction a) {
  switch (a) {
    case XAction::DiscardTb: return "discard TB_T";
    case XAction::UseTb: return "use TB_T";
    case XAction::DiscardSoft: return "discard softTB_T";
    case XAction::SoftCombine: return "softTB_T+softTB_X";
    default: return "-";
  }
}

inline const char* to_string(UsedPath p) {
  switch (p) {
    case UsedPath::Direct: return "direct";
    case UsedPath::RelayedTb: return "relayed_tb";
    case UsedPath::SoftCombined: return "soft_combined";
    default: return "none";
  }
}

/// Receiver-side soft buffer for one TB: per-CB accumulated linear SINR,
/// frozen per-CB offsets and decode state.
struct RxBuffer {
  std::vector<double> acc_lin;
  std::vector<double> cb_offset_db;
  std::vector<bool> decoded;

  RxBuffer() = default;
  explicit RxBuffer(std::vector<double> offsets)
      : acc_lin(offsets.size(), 0.0), cb_offset_db(std::move(offsets)), decoded(cb_offset_db.size(), false) {}

  std::size_t size() const { return decoded.size(); }
  bool all_decoded() const { return std::all_of(decoded.begin(), decoded.end(), [](bool b) { return b; }); }
  double acc_db(std::size_t cb) const { return lin_to_db(acc_lin[cb]); }
};

struct DecodeOutcome {
  bool pdcch_ok{false};
  bool pdsch_ok{false};         // every CB of the TB decoded after this attempt
  std::vector<double> uniforms; // decode draws: one per TB (TB mode) or per CB
  double sinr_db{0.0};
};

inline Harq feedback_of(const DecodeOutcome& o) {
  if (!o.pdcch_ok) return Harq::DTX;
  return o.pdsch_ok ? Harq::ACK : Harq::NACK;
}

struct DecodeParams {
  CbMode cb_mode{CbMode::TB};
  double pdcch_shift_db{6.0};
  double pdcch_payload_bits{40.0};
};

/// One reception. `tx_cbs` marks the CBs carried by this transmission. A
/// failed PDCCH leaves the buffer untouched (DTX). In TB mode one draw is
/// compared against the TB BLEP at the chase-combined per-CB SINRs; in CBG
/// mode every carried CB is drawn separately.
inline DecodeOutcome attempt_decode(const BlepModel& model, RxBuffer& buf, int mcs, const Segmentation& seg,
                                    double sinr_db, const std::vector<bool>& tx_cbs, const DecodeParams& p,
                                    RngStream& rng) {
  DecodeOutcome out;
  out.sinr_db = sinr_db;
  const double u_pdcch = rng.uniform();
  out.pdcch_ok = u_pdcch >= model.pdcch_blep(sinr_db, p.pdcch_shift_db, p.pdcch_payload_bits);
  const std::size_t n = seg.cbs.size();
  if (p.cb_mode == CbMode::TB) out.uniforms.assign(1, rng.uniform());
  else {
    out.uniforms.resize(n);
    for (auto& u : out.uniforms) u = rng.uniform();
  }
  if (!out.pdcch_ok) {
    out.pdsch_ok = buf.all_decoded();
    return out;
  }
  const double lin = std::isinf(sinr_db) && sinr_db < 0 ? 0.0 : db_to_lin(sinr_db);
  for (std::size_t i = 0; i < n; ++i)
    if (tx_cbs[i]) buf.acc_lin[i] += lin * db_to_lin(buf.cb_offset_db[i]);
  if (p.cb_mode == CbMode::TB) {
    if (!buf.all_decoded()) {
      std::vector<double> acc(n);
      for (std::size_t i = 0; i < n; ++i) acc[i] = buf.acc_db(i);
      const bool ok = out.uniforms[0] >= tb_blep(model, acc, mcs, seg);
      if (ok) std::fill(buf.decoded.begin(), buf.decoded.end(), true);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!tx_cbs[i] || buf.decoded[i]) continue;
      buf.decoded[i] = out.uniforms[i] >= model.blep(buf.acc_db(i), mcs, seg.cbs[i].size_bits);
    }
  }
  out.pdsch_ok = buf.all_decoded();
  return out;
}

/// Decode of UE-X's buffer combined with the soft values forwarded by UE-T,
/// reusing UE-X's own draw for the TB.
inline bool soft_combine_tb(const BlepModel& model, const RxBuffer& x, const RxBuffer& t, int mcs,
                            const Segmentation& seg, double loss_db, double u) {
  std::vector<double> comb(seg.cbs.size());
  for (std::size_t i = 0; i < comb.size(); ++i) comb[i] = cross_link_combine(x.acc_db(i), t.acc_db(i), loss_db);
  return u >= tb_blep(model, comb, mcs, seg);
}

/// Per-CB form of soft_combine_tb.
inline bool soft_combine_cb(const BlepModel& model, const RxBuffer& x, const RxBuffer& t, int mcs,
                            const Segmentation& seg, double loss_db, int cb, double u) {
  const double comb = cross_link_combine(x.acc_db(cb), t.acc_db(cb), loss_db);
  return u >= model.blep(comb, mcs, seg.cbs[cb].size_bits);
}

/// Decoding-scenario row 1..9 from the PDCCH/PDSCH status of UE-T and UE-X.
inline int decode_scenario(bool t_pdcch, bool t_pdsch, bool x_pdcch, bool x_pdsch) {
  const int t_row = t_pdcch ? (t_pdsch ? 0 : 1) : 2;
  const int x_col = x_pdcch ? (x_pdsch ? 0 : 1) : 2;
  return 3 * t_row + x_col + 1;
}

struct CoopResult {
  bool delivered_to_x{false};
  std::vector<bool> delivered_cbs;  // CB mode
  UsedPath used_path{UsedPath::None};
  Relay relay{Relay::None};
  XAction x_action{XAction::None};
  Harq hf_x1{Harq::DTX};
  Harq hf_t1{Harq::DTX};
  Harq hf_x2{Harq::ABSENT};
  int scenario{0};
  long tether_bits{0};
};

/// TB-level cooperation for one transmission. `soft_decode` is evaluated only
/// when UE-X combines the forwarded soft values with its own.
inline CoopResult cooperate_tb(CoopScheme scheme, const DecodeOutcome& t, const DecodeOutcome& x,
                               const std::function<bool()>& soft_decode) {
  CoopResult r;
  r.hf_x1 = feedback_of(x);
  r.hf_t1 = feedback_of(t);
  r.scenario = decode_scenario(t.pdcch_ok, t.pdsch_ok, x.pdcch_ok, x.pdsch_ok);
  r.delivered_to_x = x.pdsch_ok;
  r.used_path = x.pdsch_ok ? UsedPath::Direct : UsedPath::None;
  if (scheme == CoopScheme::None) return r;

  if (t.pdcch_ok && t.pdsch_ok) {
    r.relay = Relay::DecodedTb;
    if (x.pdsch_ok) {
      r.x_action = XAction::DiscardTb;
    } else {
      r.x_action = XAction::UseTb;
      r.delivered_to_x = true;
      r.used_path = UsedPath::RelayedTb;
    }
    return r;
  }
  if (scheme == CoopScheme::SSCS && t.pdcch_ok && !t.pdsch_ok) {
    r.relay = Relay::SoftTb;
    if (x.pdsch_ok) {
      r.x_action = XAction::DiscardSoft;
    } else if (x.pdcch_ok) {
      r.x_action = XAction::SoftCombine;
      const bool ok = soft_decode();
      r.hf_x2 = ok ? Harq::ACK : Harq::NACK;
      if (ok) {
        r.delivered_to_x = true;
        r.used_path = UsedPath::SoftCombined;
      }
    } else {
      r.x_action = XAction::DiscardSoft;
    }
  }
  return r;
}

struct RetxDecision {
  bool retransmit{false};
  Harq hf_j{Harq::NACK};  // ACK: offset steps down, NACK: offset steps up
};

using JointFeedbackFn = std::function<Harq(const JointFeedbackInput&)>;

/// Joint HARQ processing at the gNB: the group needs a retransmission exactly
/// when its joint feedback is negative.
inline RetxDecision needs_retransmission(CoopScheme scheme, Harq hf_x1, Harq hf_t1, Harq hf_x2,
                                         const JointFeedbackFn& resolver = joint_feedback) {
  RetxDecision d;
  d.hf_j = resolver({hf_x1, hf_t1, hf_x2, scheme});
  d.retransmit = d.hf_j == Harq::NACK;
  return d;
}

struct FailedCb {
  int index{0};
  double sinr_db{0.0};
};

/// Limited soft sharing: the ceil(fraction * n) failed CBs with the lowest
/// SINR. Variant None selects every failed CB.
inline std::vector<int> limited_cb_select(LimitedCbVariant variant, double fraction, std::span<const FailedCb> failed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("limited_cb_select: fraction out of range");
  std::vector<FailedCb> sorted(failed.begin(), failed.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const FailedCb& a, const FailedCb& b) { return a.sinr_db < b.sinr_db; });
  std::size_t take = sorted.size();
  if (variant != LimitedCbVariant::None)
    take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size()) - 1e-12));
  std::vector<int> out;
  for (std::size_t i = 0; i < take && i < sorted.size(); ++i) out.push_back(sorted[i].index);
  std::sort(out.begin(), out.end());
  return out;
}

struct CbCoopInput {
  CoopScheme scheme{CoopScheme::SCS};
  LimitedCbVariant limited{LimitedCbVariant::None};
  double fraction{1.0};
};

/// CB-level cooperation. UE-X keeps what it decoded itself, takes decoded CBs
/// from UE-T, and (SSCS) soft-combines the remaining CBs that both failed,
/// restricted to the limited subset when one is configured.
/// `soft_decode(cb)` draws the combined decode of one CB.
inline CoopResult cooperate_cb(const CbCoopInput& in, const DecodeOutcome& t, const DecodeOutcome& x,
                               const RxBuffer& t_buf, const RxBuffer& x_buf, const std::vector<bool>& tx_cbs,
                               const std::function<bool(int)>& soft_decode) {
  CoopResult r;
  r.hf_x1 = feedback_of(x);
  r.hf_t1 = feedback_of(t);
  r.scenario = decode_scenario(t.pdcch_ok, t.pdsch_ok, x.pdcch_ok, x.pdsch_ok);
  const std::size_t n = x_buf.size();
  r.delivered_cbs = x_buf.decoded;
  if (in.scheme != CoopScheme::None) {
    bool used_t = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!r.delivered_cbs[i] && t_buf.decoded[i]) {
        r.delivered_cbs[i] = true;
        used_t = true;
      }
    }
    if (t.pdcch_ok) r.relay = Relay::DecodedTb;
    r.x_action = used_t ? XAction::UseTb : (t.pdcch_ok ? XAction::DiscardTb : XAction::None);
    if (used_t) r.used_path = UsedPath::RelayedTb;

    if (in.scheme == CoopScheme::SSCS && t.pdcch_ok && !t.pdsch_ok) {
      r.relay = Relay::SoftTb;
      const bool both_nack = r.hf_x1 == Harq::NACK && r.hf_t1 == Harq::NACK;
      if (x.pdcch_ok) {
        std::vector<FailedCb> pool;
        for (std::size_t i = 0; i < n; ++i) {
          if (!tx_cbs[i]) continue;
          if (in.limited == LimitedCbVariant::CBsUET) {
            if (!t_buf.decoded[i]) pool.push_back({static_cast<int>(i), t_buf.acc_db(i)});
          } else if (!x_buf.decoded[i]) {
            pool.push_back({static_cast<int>(i), x_buf.acc_db(i)});
          }
        }
        const auto selected = limited_cb_select(in.limited, in.fraction, pool);
        bool combined_any = false;
        for (int i : selected) {
          if (r.delivered_cbs[i] || t_buf.decoded[i] || x_buf.decoded[i]) continue;
          combined_any = true;
          if (soft_decode(i)) r.delivered_cbs[i] = true;
        }
        if (combined_any) {
          r.x_action = XAction::SoftCombine;
          r.used_path = UsedPath::SoftCombined;
        }
        if (both_nack)
          r.hf_x2 = std::all_of(r.delivered_cbs.begin(), r.delivered_cbs.end(), [](bool b) { return b; }) ? Harq::ACK : Harq::NACK;
      } else if (r.x_action == XAction::None || r.x_action == XAction::DiscardTb) {
        r.x_action = XAction::DiscardSoft;
      }
    }
  }
  r.delivered_to_x = std::all_of(r.delivered_cbs.begin(), r.delivered_cbs.end(), [](bool b) { return b; });
  if (r.used_path == UsedPath::None && r.delivered_to_x) r.used_path = UsedPath::Direct;
  return r;
}

/// CBGs that still contain an undelivered CB.
inline std::vector<bool> cbg_retx_mask(const Segmentation& seg, const std::vector<bool>& delivered) {
  std::vector<bool> mask(seg.n_cbg, false);
  for (const auto& cb : seg.cbs)
    if (!delivered[cb.index]) mask[cb.cbg] = true;
  return mask;
}

inline std::vector<bool> cbs_of_mask(const Segmentation& seg, const std::vector<bool>& cbg_mask) {
  std::vector<bool> tx(seg.cbs.size(), false);
  for (const auto& cb : seg.cbs) tx[cb.index] = cbg_mask[cb.cbg];
  return tx;
}

// ---------------------------------------------------------------------------
// HARQ process

struct TbSegment {
  std::int64_t frame{0};
  long bits{0};
};

struct FeedbackLedger {
  Harq hf_x1{Harq::DTX};
  Harq hf_t1{Harq::DTX};
  Harq hf_x2{Harq::ABSENT};
  bool expects_second{false};
  long first_arrival_symbol{0};   // gNB time the first feedbacks are in
  long second_arrival_symbol{0};  // gNB time of the post-combining feedback
  int scenario{0};
};

struct HarqProcess {
  int id{0};
  int flow{0};
  bool embb{false};
  long tb_bits{0};
  std::vector<TbSegment> segments;
  int mcs{0};
  int n_prb{0};
  Segmentation seg;
  int tx_count{0};
  RxBuffer rx_x;
  RxBuffer rx_t;
  std::vector<bool> delivered;      // at UE-X, per CB
  std::vector<bool> retx_cbg_mask;  // CBGs to resend
  FeedbackLedger ledger;
  double deadline_ms{0.0};
  long first_tx_slot{0};
  bool awaiting_feedback{false};
  bool retx_pending{false};
  long retx_ready_slot{0};
};

struct RetxRequest {
  long bits{0};
  int mcs{0};
  std::vector<bool> cbg_mask;
};

/// Retransmission content: the full TB, or only the CBGs still failing.
/// Returns nothing when the retransmission budget is spent.
inline std::optional<RetxRequest> build_retransmission(const HarqProcess& p, CbMode mode, int max_retransmissions) {
  if (p.tx_count >= 1 + max_retransmissions) return std::nullopt;
  RetxRequest r;
  r.mcs = p.mcs;
  if (mode == CbMode::TB) {
    r.bits = p.tb_bits;
    r.cbg_mask.assign(p.seg.n_cbg, true);
    return r;
  }
  r.cbg_mask = p.retx_cbg_mask.empty() ? cbg_retx_mask(p.seg, p.delivered) : p.retx_cbg_mask;
  long long coded = 0, masked = 0;
  for (int g = 0; g < p.seg.n_cbg; ++g) {
    coded += p.seg.cbg_bits(g);
    if (r.cbg_mask[g]) masked += p.seg.cbg_bits(g);
  }
  // payload share of the selected groups, so a full mask costs exactly one TB
  r.bits = static_cast<long>((static_cast<long long>(p.tb_bits) * masked + coded - 1) / coded);
  return r;
}

}  // namespace xrtgr
