#pragma once

// Slot-level simulation of one drop and drop campaigns. Each slot runs in two
// phases: every cell schedules, then every reception is evaluated against the
// joint interference picture of that slot.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "xrtgr/channel.hpp"
#include "xrtgr/config.hpp"
#include "xrtgr/harq.hpp"
#include "xrtgr/link_adaptation.hpp"
#include "xrtgr/phy.hpp"
#include "xrtgr/results.hpp"
#include "xrtgr/rng.hpp"
#include "xrtgr/scheduler.hpp"
#include "xrtgr/timing.hpp"
#include "xrtgr/topology.hpp"
#include "xrtgr/traffic.hpp"

namespace xrtgr {

/// Optional CSV trace outputs; null streams are skipped.
struct TraceSinks {
  std::ostream* channel{nullptr};
  std::ostream* arrivals{nullptr};
  std::ostream* olla{nullptr};
  std::ostream* tb{nullptr};
  std::ostream* alloc{nullptr};
};

namespace detail {

struct UeCtx {
  int id{0};
  int cell{0};
  double serving_mw{0.0};
  std::vector<double> rx_mw;  // other-cell powers, 0 at the serving cell
  FadingProcess fading;
  RngStream decode;
  RngStream cb_offset;
  std::optional<CsiReport> csi;
  std::deque<CsiReport> pending;
};

struct FlowCtx {
  int id{0};
  bool embb{false};
  int cell{0};
  int ue_x{0};
  int ue_t{-1};
  OllaState olla;
  std::vector<HarqProcess> procs;
  std::vector<XrFrame> frames;
  std::size_t next_frame{0};
  std::deque<int> queue;
  long long queued_bits{0};
  long counted{0};
  long on_time{0};
};

struct FeedbackEvent {
  long slot;
  int flow;
  int proc;
  bool operator>(const FeedbackEvent& o) const {
    return std::tie(slot, flow, proc) > std::tie(o.slot, o.flow, o.proc);
  }
};

}  // namespace detail

class DropSimulator {
 public:
  DropSimulator(const ScenarioConfig& cfg, std::uint64_t drop_seed, const BlepModel& model, TraceSinks traces = {})
      : cfg_(cfg), seed_(drop_seed), model_(model), traces_(traces), clock_(cfg) {
    validate(cfg_);
    topo_ = generate_drop(cfg_, seed_);
    n_prb_ = n_prb_for(cfg_.bandwidth_hz, cfg_.scs_hz);
    noise_mw_ = db_to_lin(noise_power_dbm(cfg_.bandwidth_hz, cfg_.channel.noise_figure_db));
    total_slots_ = cfg_.total_slots();
    duration_ms_ = static_cast<double>(total_slots_) * cfg_.slot_ms();
    csi_period_ = std::max(1L, std::lround(cfg_.csi.period_ms / cfg_.slot_ms()));
    csi_delay_ = std::lround(cfg_.csi.delay_ms / cfg_.slot_ms());
    tgr_ = cfg_.user_mode == UserMode::TGr;
    scheme_ = tgr_ ? cfg_.coop_scheme : CoopScheme::None;
    build();
  }

  const Topology& topology() const { return topo_; }

  DropResult run() {
    for (long slot = 0; slot < total_slots_; ++slot) step(slot);
    finish();
    return std::move(res_);
  }

 private:
  // -------------------------------------------------------------------------
  // setup

  detail::UeCtx make_ue(const UeRecord& rec, int cell) {
    detail::UeCtx u;
    u.id = rec.id;
    u.cell = cell;
    u.serving_mw = db_to_lin(rec.rx_power_dbm[cell] + cfg_.channel.beamforming_gain_db);
    u.rx_mw.assign(rec.rx_power_dbm.size(), 0.0);
    for (std::size_t k = 0; k < rec.rx_power_dbm.size(); ++k)
      if (static_cast<int>(k) != cell) u.rx_mw[k] = db_to_lin(rec.rx_power_dbm[k] + cfg_.channel.interference_gain_db);
    const auto ent = entity_id(EntityKind::Ue, static_cast<std::uint64_t>(rec.id));
    u.fading = FadingProcess(cfg_.channel.fading_variance_db2,
                             coherence_time_ms(cfg_.channel.ue_speed_kmh, cfg_.carrier_hz), cfg_.slot_ms(),
                             RngStream(seed_, ent, Purpose::Fading));
    u.decode = RngStream(seed_, ent, Purpose::Decode);
    u.cb_offset = RngStream(seed_, ent, Purpose::CbOffset);
    return u;
  }

  void build() {
    const int n_cells = static_cast<int>(topo_.cells.size());
    res_.seed = seed_;
    res_.slots = total_slots_;
    res_.duration_ms = duration_ms_;
    res_.warmup_ms = cfg_.warmup_ms;
    res_.cells = n_cells;
    res_.total_prbs = n_prb_;
    res_.cell_prb_fraction_sum.assign(n_cells, 0.0);
    res_.cell_dl_slots.assign(n_cells, 0);
    last_activity_.assign(n_cells, 0.0);
    used_prbs_.assign(n_cells, 0);
    cell_flows_.assign(n_cells, {});

    OllaState xr_olla = OllaState::from_config(cfg_);
    OllaState embb_olla = xr_olla;
    embb_olla.target_bler = 0.1;
    embb_olla.delta_down_db = auto_delta_down(embb_olla.delta_up_db, 0.1);

    for (const auto& g : topo_.groups) {
      detail::FlowCtx f;
      f.id = static_cast<int>(flows_.size());
      f.cell = g.cell;
      f.ue_x = static_cast<int>(ues_.size());
      ues_.push_back(make_ue(g.ue_x, g.cell));
      if (g.ue_t) {
        f.ue_t = static_cast<int>(ues_.size());
        ues_.push_back(make_ue(*g.ue_t, g.cell));
        const bool lx = g.ue_x.los[g.cell], lt = g.ue_t->los[g.cell];
        const auto ps = lx && lt ? PropagationStatus::BothLos
                                 : (lx ? PropagationStatus::XLosOnly : (lt ? PropagationStatus::TLosOnly : PropagationStatus::BothNlos));
        ++res_.propagation_status[static_cast<int>(ps)];
      }
      f.olla = xr_olla;
      f.procs.resize(cfg_.harq.processes);
      for (int i = 0; i < cfg_.harq.processes; ++i) f.procs[i].id = i;
      XrFlowGenerator gen(cfg_, g.id, seed_);
      const double period = 1000.0 / cfg_.frame_rate_fps;
      for (std::int64_t k = 0;; ++k) {
        if (gen.offset_ms() + static_cast<double>(k) * period + cfg_.jitter_ms.a >= duration_ms_) break;
        XrFrame fr = gen.next_frame(k);
        if (fr.arrival_ms < duration_ms_) f.frames.push_back(fr);
      }
      std::stable_sort(f.frames.begin(), f.frames.end(),
                       [](const XrFrame& a, const XrFrame& b) { return a.arrival_ms < b.arrival_ms; });
      for (const auto& fr : f.frames) {
        res_.generated_bits += fr.size_bits;
        if (in_kpi_window(fr, cfg_.warmup_ms, duration_ms_)) ++f.counted;
        if (traces_.arrivals)
          *traces_.arrivals << f.id << ',' << fr.id << ',' << fr.arrival_ms << ',' << fr.size_bits << ','
                            << fr.deadline_ms << '\n';
      }
      cell_flows_[f.cell].push_back(f.id);
      flows_.push_back(std::move(f));
    }
    n_xr_ = static_cast<int>(flows_.size());
    for (const auto& e : topo_.embb_ues) {
      detail::FlowCtx f;
      f.id = static_cast<int>(flows_.size());
      f.embb = true;
      f.cell = e.serving_cell;
      f.ue_x = static_cast<int>(ues_.size());
      ues_.push_back(make_ue(e, e.serving_cell));
      f.olla = embb_olla;
      f.procs.resize(cfg_.harq.processes);
      for (int i = 0; i < cfg_.harq.processes; ++i) f.procs[i].id = i;
      cell_flows_[f.cell].push_back(f.id);
      res_.embb_cell.push_back(f.cell);
      flows_.push_back(std::move(f));
    }
    res_.embb_served_bits.assign(flows_.size() - n_xr_, 0.0);
    pf_ = PfState(flows_.size(), static_cast<double>(cfg_.pf_window_slots));
  }

  // -------------------------------------------------------------------------
  // slot loop

  double slot_start_ms(long slot) const { return static_cast<double>(slot) * cfg_.slot_ms(); }
  bool after_warmup(long slot) const { return slot_start_ms(slot) >= cfg_.warmup_ms; }

  void step(long slot) {
    process_feedback(slot);
    promote_csi(slot);
    update_queues(slot);
    const SlotType type = clock_.type(slot);
    if (dl_capable(type)) run_dl_slot(slot, type);
    if (slot % csi_period_ == 0) measure_csi(slot);
    for (auto& u : ues_) u.fading.step();
  }

  void promote_csi(long slot) {
    for (auto& u : ues_) {
      while (!u.pending.empty() && u.pending.front().available_slot <= slot) {
        u.csi = u.pending.front();
        u.pending.pop_front();
      }
    }
  }

  double measure_sinr(const detail::UeCtx& u) const {
    double interference = 0.0;
    for (std::size_t k = 0; k < u.rx_mw.size(); ++k) interference += u.rx_mw[k] * last_activity_[k];
    return lin_to_db(u.serving_mw * db_to_lin(u.fading.value()) / (interference + noise_mw_));
  }

  void measure_csi(long slot) {
    for (auto& u : ues_) {
      const double s = measure_sinr(u);
      u.pending.push_back(make_csi_report(model_, s, slot, csi_delay_));
      if (traces_.channel) *traces_.channel << slot << ',' << u.id << ',' << u.cell << ',' << s << ',' << u.pending.back().cqi << '\n';
    }
  }

  void lose_segments(detail::FlowCtx& f, const HarqProcess& p) {
    for (const auto& s : p.segments) f.frames[s.frame].lost_bits += s.bits;
  }

  void release(HarqProcess& p) {
    const int id = p.id;
    p = HarqProcess{};
    p.id = id;
  }

  bool active(const HarqProcess& p) const { return p.awaiting_feedback || p.retx_pending; }

  void update_queues(long slot) {
    const double now = slot_start_ms(slot);
    for (int fi = 0; fi < n_xr_; ++fi) {
      auto& f = flows_[fi];
      while (f.next_frame < f.frames.size() && f.frames[f.next_frame].arrival_ms <= now) {
        f.queue.push_back(static_cast<int>(f.next_frame));
        f.queued_bits += f.frames[f.next_frame].size_bits;
        ++f.next_frame;
      }
      while (!f.queue.empty() && f.frames[f.queue.front()].deadline_ms < now) {
        auto& fr = f.frames[f.queue.front()];
        const long unsent = fr.size_bits - fr.sent_bits;
        fr.lost_bits += unsent;
        fr.sent_bits = fr.size_bits;
        f.queued_bits -= unsent;
        f.queue.pop_front();
      }
      for (auto& p : f.procs) {
        if (!p.retx_pending) continue;
        const bool all_expired = std::all_of(p.segments.begin(), p.segments.end(),
                                             [&](const TbSegment& s) { return f.frames[s.frame].deadline_ms < now; });
        if (all_expired) {
          lose_segments(f, p);
          ++res_.xr_tb_dropped;
          release(p);
        }
      }
    }
  }

  double group_sinr_of(const detail::FlowCtx& f, long slot) const {
    const auto& x = ues_[f.ue_x];
    if (x.csi && x.csi->available_slot > slot) throw std::logic_error("CSI used before it is available");
    if (f.ue_t < 0) return group_sinr(x.csi, std::nullopt, CsiMode::UEX);
    const auto& t = ues_[f.ue_t];
    if (t.csi && t.csi->available_slot > slot) throw std::logic_error("CSI used before it is available");
    return group_sinr(x.csi, t.csi, cfg_.csi_mode);
  }

  bool has_csi(const detail::FlowCtx& f) const {
    if (!ues_[f.ue_x].csi) return false;
    if (f.ue_t >= 0 && cfg_.csi_mode == CsiMode::Best && !ues_[f.ue_t].csi) return false;
    return true;
  }

  double target_of(const detail::FlowCtx& f) const { return f.olla.target_bler; }

  std::optional<Grant> new_tx_grant(const detail::FlowCtx& f, double gamma_eff, int sym, int max_prb) const {
    const long long demand = f.embb ? EmbbDemand::pending_bits() : f.queued_bits;
    if (demand <= 0) return std::nullopt;
    const double target = target_of(f);
    Grant g;
    for (int mcs = kMaxMcs; mcs >= 0; --mcs) {
      const int n = f.embb ? max_prb : prbs_for_bits(mcs, static_cast<long>(std::min<long long>(demand, 1LL << 40)), sym, max_prb);
      const long tb = tbs_cached(mcs, n, sym);
      g = {n, mcs, tb};
      if (model_.blep(gamma_eff, mcs, static_cast<double>(tb)) <= target + 1e-12) return g;
    }
    return g;
  }

  int pick_retx(detail::FlowCtx& f, long slot) const {
    int best = -1;
    for (const auto& p : f.procs)
      if (p.retx_pending && p.retx_ready_slot <= slot &&
          (best < 0 || p.retx_ready_slot < f.procs[best].retx_ready_slot))
        best = p.id;
    return best;
  }

  int free_process(const detail::FlowCtx& f) const {
    for (const auto& p : f.procs)
      if (!active(p)) return p.id;
    return -1;
  }

  void run_dl_slot(long slot, SlotType type) {
    const int sym = dl_data_symbols(type, cfg_);
    const int n_cells = static_cast<int>(topo_.cells.size());
    std::vector<SlotAllocation> allocs(n_cells);
    for (int c = 0; c < n_cells; ++c) {
      std::vector<Candidate> cands;
      for (int fi : cell_flows_[c]) {
        auto& f = flows_[fi];
        if (!has_csi(f)) continue;
        const double gamma_eff = effective_sinr(group_sinr_of(f, slot), f.olla);
        const int r = pick_retx(f, slot);
        if (r >= 0) {
          const auto& p = f.procs[r];
          const auto req = build_retransmission(p, cfg_.cb_mode == CbMode::CBG && !f.embb ? CbMode::CBG : CbMode::TB,
                                                cfg_.harq.max_retransmissions);
          if (req) {
            Candidate cand;
            cand.flow = fi;
            cand.cls = f.embb ? PriorityClass::EmbbRetx : PriorityClass::XrRetx;
            cand.inst_rate = kMcsTable[p.mcs].spectral_efficiency();
            cand.tag = r;
            const long bits = req->bits;
            const int mcs = p.mcs;
            cand.grant = [bits, mcs, sym](int max_prb) -> std::optional<Grant> {
              const int n = prbs_for_bits(mcs, bits, sym, max_prb);
              const long tb = tbs_cached(mcs, n, sym);
              if (tb < bits) return std::nullopt;
              return Grant{n, mcs, tb};
            };
            cands.push_back(std::move(cand));
          }
        }
        if ((f.embb || f.queued_bits > 0) && free_process(f) >= 0) {
          Candidate cand;
          cand.flow = fi;
          cand.cls = f.embb ? PriorityClass::EmbbNew : PriorityClass::XrNew;
          cand.inst_rate = kMcsTable[select_mcs(gamma_eff, model_, target_of(f), model_.ref_block_bits())].spectral_efficiency();
          cand.grant = [this, fi, gamma_eff, sym](int max_prb) { return new_tx_grant(flows_[fi], gamma_eff, sym, max_prb); };
          cands.push_back(std::move(cand));
        }
      }
      allocs[c] = schedule_slot(std::move(cands), pf_, slot, type, n_prb_, sym);
      if (!allocs[c].disjoint()) throw std::logic_error("PRB double booking");
      used_prbs_[c] = allocs[c].used_prbs();
    }

    std::vector<double> served(flows_.size(), 0.0);
    for (int c = 0; c < n_cells; ++c) {
      for (const auto& e : allocs[c].entries) {
        served[e.flow] += static_cast<double>(e.tb_bits);
        transmit(slot, type, sym, c, e);
      }
    }
    pf_update(pf_, served);
    const bool kpi = after_warmup(slot);
    for (int c = 0; c < n_cells; ++c) {
      last_activity_[c] = static_cast<double>(used_prbs_[c]) / n_prb_;
      if (kpi) {
        res_.cell_prb_fraction_sum[c] += last_activity_[c];
        ++res_.cell_dl_slots[c];
      }
    }
  }

  double rx_sinr(const detail::UeCtx& u, int start, int n) const {
    double interference = 0.0;
    const int end = start + n;
    for (std::size_t k = 0; k < u.rx_mw.size(); ++k) {
      if (u.rx_mw[k] == 0.0) continue;
      const int ov = std::max(0, std::min(end, used_prbs_[k]) - start);
      if (ov > 0) interference += u.rx_mw[k] * static_cast<double>(ov) / n;
    }
    return lin_to_db(u.serving_mw * db_to_lin(u.fading.value()) / (interference + noise_mw_));
  }

  void open_process(detail::FlowCtx& f, HarqProcess& p, long slot, const AllocationEntry& e) {
    const bool cbg = cfg_.cb_mode == CbMode::CBG && !f.embb;
    p.flow = f.id;
    p.embb = f.embb;
    p.tb_bits = e.tb_bits;
    p.mcs = e.mcs;
    p.n_prb = e.n_prb;
    p.seg = segment_tb(e.tb_bits, cbg ? cfg_.max_cbgs : 1);
    const std::size_t n = p.seg.cbs.size();
    const double var = cbg ? cfg_.blep.per_cb_sinr_variance_db2 : 0.0;
    p.rx_x = RxBuffer(draw_cb_offsets(n, var, ues_[f.ue_x].cb_offset));
    if (f.ue_t >= 0) p.rx_t = RxBuffer(draw_cb_offsets(n, var, ues_[f.ue_t].cb_offset));
    p.delivered.assign(n, false);
    p.retx_cbg_mask.assign(p.seg.n_cbg, true);
    p.first_tx_slot = slot;
    p.segments.clear();
    if (!f.embb) {
      long room = e.tb_bits;
      double deadline = 0.0;
      while (room > 0 && !f.queue.empty()) {
        auto& fr = f.frames[f.queue.front()];
        const long take = std::min(room, fr.size_bits - fr.sent_bits);
        p.segments.push_back({f.queue.front(), take});
        fr.sent_bits += take;
        f.queued_bits -= take;
        room -= take;
        deadline = std::max(deadline, fr.deadline_ms);
        if (fr.sent_bits == fr.size_bits) f.queue.pop_front();
      }
      p.deadline_ms = deadline;
    }
  }

  void transmit(long slot, SlotType type, int sym, int cell, const AllocationEntry& e) {
    auto& f = flows_[e.flow];
    const bool retx = is_retx(e.cls);
    const bool cbg = cfg_.cb_mode == CbMode::CBG && !f.embb;
    int pid = e.tag;
    if (!retx) {
      pid = free_process(f);
      if (pid < 0) throw std::logic_error("no free HARQ process");
      open_process(f, f.procs[pid], slot, e);
    }
    auto& p = f.procs[pid];
    if (retx) {
      p.retx_pending = false;
      if (!f.embb) {
        ++res_.xr_retx;
        res_.xr_retx_prbs += e.n_prb;
        res_.xr_retx_full_tb_prbs += prbs_for_bits(p.mcs, p.tb_bits, sym, n_prb_);
      } else {
        ++res_.embb_retx;
      }
    } else if (!f.embb) {
      ++res_.xr_initial_tx;
      res_.xr_new_prbs += e.n_prb;
      if (after_warmup(slot)) ++res_.xr_initial_mcs[e.mcs];
    } else {
      ++res_.embb_initial_tx;
    }
    ++p.tx_count;
    p.awaiting_feedback = true;

    if (traces_.alloc)
      *traces_.alloc << slot << ',' << cell << ',' << e.flow << ',' << to_string(e.cls) << ',' << e.prb_start << ','
                     << e.n_prb << ',' << e.mcs << ',' << e.tb_bits << '\n';

    const std::vector<bool> tx_cbs =
        cbg ? cbs_of_mask(p.seg, retx ? p.retx_cbg_mask : std::vector<bool>(p.seg.n_cbg, true))
            : std::vector<bool>(p.seg.cbs.size(), true);
    DecodeParams dp;
    dp.cb_mode = cbg ? CbMode::CBG : CbMode::TB;
    dp.pdcch_shift_db = cfg_.blep.pdcch_shift_db;
    dp.pdcch_payload_bits = cfg_.blep.pdcch_payload_bits;

    auto& ux = ues_[f.ue_x];
    const double sx = rx_sinr(ux, e.prb_start, e.n_prb);
    const DecodeOutcome ox = attempt_decode(model_, p.rx_x, p.mcs, p.seg, sx, tx_cbs, dp, ux.decode);

    CoopResult r;
    double st = std::numeric_limits<double>::quiet_NaN();
    const bool was_delivered = std::all_of(p.delivered.begin(), p.delivered.end(), [](bool b) { return b; });
    if (f.ue_t >= 0 && scheme_ != CoopScheme::None) {
      auto& ut = ues_[f.ue_t];
      st = rx_sinr(ut, e.prb_start, e.n_prb);
      const bool t_had_all = p.rx_t.all_decoded();
      const std::vector<bool> t_had = p.rx_t.decoded;
      const DecodeOutcome ot = attempt_decode(model_, p.rx_t, p.mcs, p.seg, st, tx_cbs, dp, ut.decode);
      const double loss = cfg_.blep.combining_loss_db;
      if (!cbg) {
        auto soft = [&] { return soft_combine_tb(model_, p.rx_x, p.rx_t, p.mcs, p.seg, loss, ox.uniforms[0]); };
        r = cooperate_tb(scheme_, ot, ox, soft);
        if (r.relay == Relay::DecodedTb && !t_had_all) res_.tether.decoded_bits += p.tb_bits;
        if (r.relay == Relay::SoftTb) res_.tether.soft_bits += coded_bits(p, sym) * cfg_.harq.llr_bits;
      } else {
        auto soft = [&](int i) { return soft_combine_cb(model_, p.rx_x, p.rx_t, p.mcs, p.seg, loss, i, ox.uniforms[i]); };
        CbCoopInput in{scheme_, cfg_.limited_cb.variant, cfg_.limited_cb.fraction};
        r = cooperate_cb(in, ot, ox, p.rx_t, p.rx_x, tx_cbs, soft);
        tether_cb_volume(p, t_had, tx_cbs, r, sym);
      }
      p.ledger.hf_t1 = r.hf_t1;
    } else {
      r.hf_x1 = feedback_of(ox);
      r.delivered_to_x = ox.pdsch_ok;
      r.delivered_cbs = p.rx_x.decoded;
      r.used_path = ox.pdsch_ok ? UsedPath::Direct : UsedPath::None;
    }
    if (cbg) {
      p.delivered = r.delivered_cbs;
      p.rx_x.decoded = r.delivered_cbs;
    } else if (r.delivered_to_x) {
      std::fill(p.delivered.begin(), p.delivered.end(), true);
    }
    p.ledger.hf_x1 = r.hf_x1;
    if (f.ue_t < 0 || scheme_ == CoopScheme::None) p.ledger.hf_t1 = Harq::DTX;
    p.ledger.hf_x2 = r.hf_x2;
    p.ledger.scenario = r.scenario;
    if (r.scenario > 0) ++res_.scenario_counts[r.scenario];

    const long tx_end = clock_.tx_end_symbol(slot);
    const bool now_delivered = std::all_of(p.delivered.begin(), p.delivered.end(), [](bool b) { return b; });
    if (now_delivered && !was_delivered) deliver(f, p, clock_.symbol_to_ms(tx_end + clock_.ue_proc_symbols()), slot);

    // feedback timeline
    const long first_fb = clock_.feedback_symbol(clock_.ue_ready_symbol(tx_end));
    long ready = clock_.gnb_action_slot(first_fb);
    p.ledger.expects_second = scheme_ == CoopScheme::SSCS && r.hf_x1 == Harq::NACK && r.hf_t1 == Harq::NACK;
    p.ledger.first_arrival_symbol = first_fb;
    if (p.ledger.expects_second) {
      if (r.hf_x2 != Harq::ABSENT) {
        const long second_fb = clock_.feedback_symbol(clock_.ue_ready_symbol(tx_end) + clock_.ue_proc_symbols());
        p.ledger.second_arrival_symbol = second_fb;
        ready = std::max(ready, clock_.gnb_action_slot(second_fb));
      } else {
        ready = std::max(ready, clock_.gnb_action_slot(first_fb) + cfg_.harq.second_feedback_timeout_slots);
      }
    }
    events_.push({ready, f.id, pid});

    if (traces_.tb)
      *traces_.tb << slot << ',' << cell << ',' << f.id << ',' << pid << ',' << p.tx_count << ',' << p.mcs << ','
                  << e.n_prb << ',' << p.tb_bits << ',' << sx << ',' << st << ',' << r.scenario << ','
                  << to_string(r.relay) << ',' << to_string(r.x_action) << ',' << to_string(r.hf_x1) << ','
                  << to_string(r.hf_t1) << ',' << to_string(r.hf_x2) << ',' << (now_delivered ? 1 : 0) << '\n';
    (void)type;
  }

  long long coded_bits(const HarqProcess& p, int sym) const {
    const int re = std::min(156, 12 * sym - 12);
    return static_cast<long long>(p.n_prb) * re * kMcsTable[p.mcs].modulation_order;
  }

  void tether_cb_volume(const HarqProcess& p, const std::vector<bool>& t_had, const std::vector<bool>& tx_cbs,
                        const CoopResult& r, int sym) {
    const double per_bit = static_cast<double>(coded_bits(p, sym)) / static_cast<double>(p.tb_bits + kCrcBits);
    int soft_cbs = 0;
    for (std::size_t i = 0; i < p.seg.cbs.size(); ++i) {
      if (p.rx_t.decoded[i] && !t_had[i]) res_.tether.decoded_bits += p.seg.cbs[i].size_bits;
      if (r.relay == Relay::SoftTb && tx_cbs[i] && !p.rx_t.decoded[i]) ++soft_cbs;
    }
    if (r.relay != Relay::SoftTb) return;
    // soft values are sent for the failed CBs of this transmission, or the selected subset
    long long bits = 0;
    const int c = static_cast<int>(p.seg.cbs.size());
    int sent = soft_cbs;
    if (cfg_.limited_cb.variant != LimitedCbVariant::None)
      sent = static_cast<int>(std::ceil(cfg_.limited_cb.fraction * soft_cbs - 1e-12));
    for (std::size_t i = 0; i < p.seg.cbs.size() && sent > 0; ++i)
      if (tx_cbs[i] && !p.rx_t.decoded[i]) {
        bits += static_cast<long long>(std::llround(p.seg.cbs[i].size_bits * per_bit)) * cfg_.harq.llr_bits;
        --sent;
      }
    res_.tether.soft_bits += bits;
    if (cfg_.limited_cb.variant != LimitedCbVariant::None && c > 1)
      res_.tether.index_bits += static_cast<long long>(std::ceil(std::log2(c))) *
                                static_cast<long long>(std::ceil(cfg_.limited_cb.fraction * soft_cbs - 1e-12));
  }

  void deliver(detail::FlowCtx& f, HarqProcess& p, double t_ms, long slot) {
    if (f.embb) {
      if (after_warmup(slot)) res_.embb_served_bits[f.id - n_xr_] += static_cast<double>(p.tb_bits);
      return;
    }
    for (const auto& s : p.segments) {
      auto& fr = f.frames[s.frame];
      fr.delivered_bits += s.bits;
      if (fr.delivered_bits == fr.size_bits && fr.lost_bits == 0 && !fr.completed()) {
        fr.completion_ms = t_ms;
        if (in_kpi_window(fr, cfg_.warmup_ms, duration_ms_) && fr.on_time()) ++f.on_time;
      }
    }
  }

  void process_feedback(long slot) {
    while (!events_.empty() && events_.top().slot <= slot) {
      const auto ev = events_.top();
      events_.pop();
      if (ev.slot < slot) throw std::logic_error("feedback event skipped");
      auto& f = flows_[ev.flow];
      auto& p = f.procs[ev.proc];
      if (!p.awaiting_feedback) throw std::logic_error("feedback for an idle HARQ process");
      const long first_slot = clock_.gnb_action_slot(p.ledger.first_arrival_symbol);
      if (first_slot > slot) throw std::logic_error("feedback consumed before it is available");
      p.awaiting_feedback = false;
      const CoopScheme sch = f.embb ? CoopScheme::None : scheme_;
      const Harq hf_j = joint_feedback({p.ledger.hf_x1, p.ledger.hf_t1, p.ledger.hf_x2, sch});
      if (p.tx_count == 1) {
        f.olla = olla_update(f.olla, hf_j);
        if (!f.embb && slot_start_ms(p.first_tx_slot) >= cfg_.warmup_ms) {
          ++res_.initial_tx_kpi;
          if (hf_j == Harq::NACK) ++res_.initial_nack_kpi;
        }
        if (traces_.olla) *traces_.olla << slot << ',' << f.id << ',' << to_string(hf_j) << ',' << f.olla.offset_db << '\n';
      }
      const bool delivered = std::all_of(p.delivered.begin(), p.delivered.end(), [](bool b) { return b; });
      const bool cbg = cfg_.cb_mode == CbMode::CBG && !f.embb;
      const bool retransmit = cbg ? !delivered : hf_j == Harq::NACK;
      if (!retransmit) {
        release(p);
        continue;
      }
      if (cbg) p.retx_cbg_mask = cbg_retx_mask(p.seg, p.delivered);
      const auto req = build_retransmission(p, cbg ? CbMode::CBG : CbMode::TB, cfg_.harq.max_retransmissions);
      if (!req) {
        if (!f.embb) {
          lose_segments(f, p);
          ++res_.xr_tb_dropped;
        }
        release(p);
        continue;
      }
      if (!f.embb) ++res_.retx_causes[p.ledger.scenario][harq_index(p.ledger.hf_x2)];
      p.retx_pending = true;
      p.retx_ready_slot = slot;
    }
  }

  void finish() {
    for (int fi = 0; fi < n_xr_; ++fi) {
      auto& f = flows_[fi];
      for (const auto& p : f.procs)
        if (active(p))
          for (const auto& s : p.segments) res_.in_flight_bits += s.bits;
      for (auto& fr : f.frames) {
        res_.delivered_bits += fr.delivered_bits;
        res_.lost_bits += fr.lost_bits;
        res_.queued_bits += fr.size_bits - fr.sent_bits;
      }
      res_.frames.push_back(std::move(f.frames));
      res_.flow_cell.push_back(f.cell);
      res_.flow_counted.push_back(f.counted);
      res_.flow_on_time.push_back(f.on_time);
      res_.final_olla_offset_db.push_back(f.olla.offset_db);
    }
    // A delivered TB whose feedback is still pending counts as delivered, not in flight.
    for (int fi = 0; fi < n_xr_; ++fi)
      for (const auto& p : flows_[fi].procs)
        if (active(p) && std::all_of(p.delivered.begin(), p.delivered.end(), [](bool b) { return b; }))
          for (const auto& s : p.segments) res_.in_flight_bits -= s.bits;
  }

  const ScenarioConfig& cfg_;
  std::uint64_t seed_;
  const BlepModel& model_;
  TraceSinks traces_;
  FrameClock clock_;
  Topology topo_;
  int n_prb_{0};
  double noise_mw_{0.0};
  long total_slots_{0};
  double duration_ms_{0.0};
  long csi_period_{4};
  long csi_delay_{4};
  bool tgr_{true};
  CoopScheme scheme_{CoopScheme::SSCS};
  std::vector<detail::UeCtx> ues_;
  std::vector<detail::FlowCtx> flows_;
  int n_xr_{0};
  std::vector<std::vector<int>> cell_flows_;
  std::vector<double> last_activity_;
  std::vector<int> used_prbs_;
  PfState pf_;
  std::priority_queue<detail::FeedbackEvent, std::vector<detail::FeedbackEvent>, std::greater<>> events_;
  DropResult res_;
};

inline DropResult run_drop(const ScenarioConfig& cfg, std::uint64_t drop_seed, TraceSinks traces = {}) {
  const BlepModel model = BlepModel::from_config(cfg.blep);
  return DropSimulator(cfg, drop_seed, model, traces).run();
}

inline DropResult run_drop(const ScenarioConfig& cfg, std::uint64_t drop_seed, const BlepModel& model,
                           TraceSinks traces = {}) {
  return DropSimulator(cfg, drop_seed, model, traces).run();
}

using ProgressFn = std::function<void(int done, int total)>;

/// Drop d uses seed cfg.seed + d. Results come back in drop order whatever
/// the number of worker threads.
inline std::vector<DropResult> run_campaign(const ScenarioConfig& cfg, int parallel = 1, const ProgressFn& progress = {}) {
  validate(cfg);
  const BlepModel model = BlepModel::from_config(cfg.blep);
  const int n = cfg.drops;
  std::vector<DropResult> out(n);
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const int d = next.fetch_add(1);
      if (d >= n) return;
      try {
        out[d] = run_drop(cfg, cfg.seed + static_cast<std::uint64_t>(d), model);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
      const int k = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lk(err_mu);
        progress(k, n);
      }
    }
  };
  const int threads = std::clamp(parallel, 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace xrtgr
