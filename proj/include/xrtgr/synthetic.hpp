#pragma once

// Stand-alone link harnesses without topology or scheduling: a single flow
// driven by a fixed SINR, and independent TBs decoded under every scheme with
// shared decode draws.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "xrtgr/config.hpp"
#include "xrtgr/harq.hpp"
#include "xrtgr/link_adaptation.hpp"
#include "xrtgr/phy.hpp"
#include "xrtgr/rng.hpp"

namespace xrtgr {

struct StationaryLinkConfig {
  double sinr_x_db{8.0};
  double sinr_t_db{6.0};
  CoopScheme scheme{CoopScheme::SSCS};
  CsiMode csi{CsiMode::Best};
  int n_prb{40};
  int n_data_symbols{13};
  long warmup_slots{10'000};
  long slots{200'000};
  double target_bler{0.1};
  double delta_up_db{0.5};
  std::uint64_t seed{1};
};

struct StationaryLinkResult {
  long transmissions{0};
  long failures{0};  // negative joint feedback after cooperation
  double bler{0.0};
  double final_offset_db{0.0};
  std::array<long, kMaxMcs + 1> mcs_histogram{};
};

/// Every slot carries a fresh TB at the OLLA-corrected MCS; the joint feedback
/// drives the offset. Only slots after the warm-up are counted.
inline StationaryLinkResult run_stationary_link(const StationaryLinkConfig& c, const BlepModel& model) {
  OllaState olla;
  olla.target_bler = c.target_bler;
  olla.delta_up_db = c.delta_up_db;
  olla.delta_down_db = auto_delta_down(c.delta_up_db, c.target_bler);
  olla.min_offset_db = -20.0;
  olla.max_offset_db = 20.0;

  const CsiReport rx{c.sinr_x_db, model.cqi_from_sinr(c.sinr_x_db), 0, 0};
  const CsiReport rt{c.sinr_t_db, model.cqi_from_sinr(c.sinr_t_db), 0, 0};
  const bool coop = c.scheme != CoopScheme::None;
  const double gamma = group_sinr(rx, coop ? std::optional<CsiReport>(rt) : std::nullopt, coop ? c.csi : CsiMode::UEX);

  RngStream dx(c.seed, entity_id(EntityKind::Ue, 0), Purpose::Decode);
  RngStream dt(c.seed, entity_id(EntityKind::Ue, 1), Purpose::Decode);
  const DecodeParams dp;
  StationaryLinkResult out;
  for (long s = 0; s < c.warmup_slots + c.slots; ++s) {
    const double eff = effective_sinr(gamma, olla);
    int mcs = 0;
    for (int m = kMaxMcs; m >= 0; --m) {
      mcs = m;
      if (model.blep(eff, m, static_cast<double>(tbs_cached(m, c.n_prb, c.n_data_symbols))) <= c.target_bler + 1e-12)
        break;
    }
    const long bits = tbs_cached(mcs, c.n_prb, c.n_data_symbols);
    const Segmentation seg = segment_tb(bits, 1);
    const std::vector<bool> all(seg.cbs.size(), true);
    RxBuffer bx(std::vector<double>(seg.cbs.size(), 0.0));
    RxBuffer bt(std::vector<double>(seg.cbs.size(), 0.0));
    const DecodeOutcome ox = attempt_decode(model, bx, mcs, seg, c.sinr_x_db, all, dp, dx);
    Harq hf_j = feedback_of(ox) == Harq::ACK ? Harq::ACK : Harq::NACK;
    if (coop) {
      const DecodeOutcome ot = attempt_decode(model, bt, mcs, seg, c.sinr_t_db, all, dp, dt);
      const CoopResult r = cooperate_tb(c.scheme, ot, ox, [&] {
        return soft_combine_tb(model, bx, bt, mcs, seg, 0.0, ox.uniforms[0]);
      });
      hf_j = needs_retransmission(c.scheme, r.hf_x1, r.hf_t1, r.hf_x2).hf_j;
    }
    olla = olla_update(olla, hf_j);
    if (s < c.warmup_slots) continue;
    ++out.transmissions;
    if (hf_j == Harq::NACK) ++out.failures;
    ++out.mcs_histogram[mcs];
  }
  out.bler = out.transmissions > 0 ? static_cast<double>(out.failures) / static_cast<double>(out.transmissions) : 0.0;
  out.final_offset_db = olla.offset_db;
  return out;
}

struct TbFateConfig {
  long tbs{100'000};
  CbMode cb_mode{CbMode::TB};
  double min_sinr_db{-5.0};
  double max_sinr_db{25.0};
  double per_cb_variance_db2{1.0};
  std::uint64_t seed{1};
};

/// Failure flags of one TB under legacy, SCS and SSCS (in that order).
struct TbFate {
  std::array<bool, 3> failed{};
  int scenario{0};
};

/// Each TB gets random SINRs, MCS and size. Every scheme decodes it from
/// copies of the same per-receiver streams, so the schemes differ only in how
/// the two receptions are used.
inline std::vector<TbFate> simulate_tb_fates(const TbFateConfig& c, const BlepModel& model) {
  std::vector<TbFate> out;
  out.reserve(static_cast<std::size_t>(c.tbs));
  RngStream draw(c.seed, entity_id(EntityKind::Drop, 0), Purpose::Test);
  DecodeParams dp;
  dp.cb_mode = c.cb_mode;
  const double var = c.cb_mode == CbMode::CBG ? c.per_cb_variance_db2 : 0.0;
  for (long i = 0; i < c.tbs; ++i) {
    const double sx = draw.uniform(c.min_sinr_db, c.max_sinr_db);
    const double st = draw.uniform(c.min_sinr_db, c.max_sinr_db);
    const int mcs = draw.uniform_int(0, kMaxMcs);
    const int n_prb = draw.uniform_int(1, 273);
    const long bits = tbs_cached(mcs, n_prb, 13);
    const Segmentation seg = segment_tb(bits, c.cb_mode == CbMode::CBG ? 8 : 1);
    const std::vector<bool> all(seg.cbs.size(), true);
    const auto idx = static_cast<std::uint64_t>(i);
    RngStream off_x(c.seed, entity_id(EntityKind::Ue, 2 * idx), Purpose::CbOffset);
    RngStream off_t(c.seed, entity_id(EntityKind::Ue, 2 * idx + 1), Purpose::CbOffset);
    const auto ofs_x = draw_cb_offsets(seg.cbs.size(), var, off_x);
    const auto ofs_t = draw_cb_offsets(seg.cbs.size(), var, off_t);

    TbFate fate;
    const std::array<CoopScheme, 3> schemes{CoopScheme::None, CoopScheme::SCS, CoopScheme::SSCS};
    for (std::size_t k = 0; k < schemes.size(); ++k) {
      RngStream dx(c.seed, entity_id(EntityKind::Ue, 2 * idx), Purpose::Decode);
      RngStream dt(c.seed, entity_id(EntityKind::Ue, 2 * idx + 1), Purpose::Decode);
      RxBuffer bx(ofs_x), bt(ofs_t);
      const DecodeOutcome ox = attempt_decode(model, bx, mcs, seg, sx, all, dp, dx);
      if (schemes[k] == CoopScheme::None) {
        fate.failed[k] = !ox.pdsch_ok;
        continue;
      }
      const DecodeOutcome ot = attempt_decode(model, bt, mcs, seg, st, all, dp, dt);
      CoopResult r;
      if (c.cb_mode == CbMode::TB) {
        r = cooperate_tb(schemes[k], ot, ox, [&] { return soft_combine_tb(model, bx, bt, mcs, seg, 0.0, ox.uniforms[0]); });
      } else {
        r = cooperate_cb({schemes[k], LimitedCbVariant::None, 1.0}, ot, ox, bt, bx, all,
                         [&](int cb) { return soft_combine_cb(model, bx, bt, mcs, seg, 0.0, cb, ox.uniforms[cb]); });
      }
      fate.failed[k] = !r.delivered_to_x;
      fate.scenario = r.scenario;
    }
    out.push_back(fate);
  }
  return out;
}

}  // namespace xrtgr
