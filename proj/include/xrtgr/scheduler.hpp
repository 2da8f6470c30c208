#pragma once

// TDD slot typing, proportional-fair bookkeeping and the strict-priority PRB
// allocator used by every cell.

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrtgr/config.hpp"

namespace xrtgr {

enum class SlotType { D, S, U };

inline char to_char(SlotType t) { return t == SlotType::D ? 'D' : (t == SlotType::S ? 'S' : 'U'); }

inline SlotType slot_type(long slot, const std::string& pattern = "DDDSU") {
  if (pattern.empty()) throw std::invalid_argument("empty TDD pattern");
  switch (pattern[static_cast<std::size_t>(slot % static_cast<long>(pattern.size()))]) {
    case 'D': return SlotType::D;
    case 'S': return SlotType::S;
    case 'U': return SlotType::U;
    default: throw std::invalid_argument("bad TDD pattern '" + pattern + "'");
  }
}

inline bool dl_capable(SlotType t) { return t != SlotType::U; }

/// PDSCH symbols of a slot (0 for UL slots).
inline int dl_data_symbols(SlotType t, const ScenarioConfig& cfg) {
  if (t == SlotType::D) return cfg.dl_symbols_d;
  if (t == SlotType::S) return cfg.dl_symbols_s;
  return 0;
}

// Strict priority, highest first.
enum class PriorityClass { XrRetx = 0, XrNew = 1, EmbbRetx = 2, EmbbNew = 3 };

inline const char* to_string(PriorityClass c) {
  switch (c) {
    case PriorityClass::XrRetx: return "xr_retx";
    case PriorityClass::XrNew: return "xr_new";
    case PriorityClass::EmbbRetx: return "embb_retx";
    default: return "embb_new";
  }
}

inline bool is_retx(PriorityClass c) { return c == PriorityClass::XrRetx || c == PriorityClass::EmbbRetx; }

struct Grant {
  int n_prb{0};
  int mcs{0};
  long tb_bits{0};
};

struct AllocationEntry {
  int flow{0};
  PriorityClass cls{PriorityClass::XrNew};
  int prb_start{0};
  int n_prb{0};
  int mcs{0};
  long tb_bits{0};
  int tag{-1};  // caller-side handle, e.g. the HARQ process
};

struct SlotAllocation {
  long slot{0};
  SlotType type{SlotType::D};
  int n_data_symbols{0};
  int total_prbs{0};
  std::vector<AllocationEntry> entries;

  int used_prbs() const {
    int n = 0;
    for (const auto& e : entries) n += e.n_prb;
    return n;
  }

  bool disjoint() const {
    std::vector<std::pair<int, int>> r;
    for (const auto& e : entries) {
      if (e.n_prb < 0 || e.prb_start < 0 || e.prb_start + e.n_prb > total_prbs) return false;
      r.emplace_back(e.prb_start, e.prb_start + e.n_prb);
    }
    std::sort(r.begin(), r.end());
    for (std::size_t i = 1; i < r.size(); ++i)
      if (r[i].first < r[i - 1].second) return false;
    return true;
  }
};

/// Exponentially averaged served bits per slot for each flow.
struct PfState {
  double window_slots{100.0};
  double epsilon{1.0};
  std::vector<double> avg;

  PfState() = default;
  PfState(std::size_t flows, double window, double eps = 1.0)
      : window_slots(window), epsilon(eps), avg(flows, eps) {}

  double metric(int flow, double inst_rate) const { return inst_rate / std::max(avg.at(flow), epsilon); }
};

/// avg <- (1 - 1/W) avg + (1/W) served, for every flow in `served_bits`.
inline void pf_update(PfState& pf, const std::vector<double>& served_bits) {
  if (served_bits.size() != pf.avg.size()) throw std::invalid_argument("pf_update: size mismatch");
  const double a = 1.0 / pf.window_slots;
  for (std::size_t i = 0; i < pf.avg.size(); ++i)
    pf.avg[i] = std::max(pf.epsilon, (1.0 - a) * pf.avg[i] + a * served_bits[i]);
}

/// A flow asking for resources this slot. `grant` sizes the transmission for
/// at most `max_prb` PRBs and returns nothing when it cannot fit.
struct Candidate {
  int flow{0};
  PriorityClass cls{PriorityClass::XrNew};
  double inst_rate{0.0};
  int tag{-1};
  std::function<std::optional<Grant>(int max_prb)> grant;
};

/// Candidates are served class by class; inside a class by descending PF
/// metric, ties to the lowest flow id. Each flow gets at most one TB per
/// slot and PRBs are handed out contiguously from PRB 0.
inline SlotAllocation schedule_slot(std::vector<Candidate> cands, const PfState& pf, long slot, SlotType type,
                                    int total_prbs, int n_data_symbols) {
  SlotAllocation out;
  out.slot = slot;
  out.type = type;
  out.n_data_symbols = n_data_symbols;
  out.total_prbs = total_prbs;
  if (!dl_capable(type) || n_data_symbols <= 0) return out;
  std::vector<double> metric(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) metric[i] = pf.metric(cands[i].flow, cands[i].inst_rate);
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cands[a].cls != cands[b].cls) return cands[a].cls < cands[b].cls;
    if (metric[a] != metric[b]) return metric[a] > metric[b];
    if (cands[a].flow != cands[b].flow) return cands[a].flow < cands[b].flow;
    return a < b;
  });
  std::vector<int> served;
  int next = 0;
  for (std::size_t i : order) {
    const int left = total_prbs - next;
    if (left <= 0) break;
    auto& c = cands[i];
    if (std::find(served.begin(), served.end(), c.flow) != served.end()) continue;
    const auto g = c.grant(left);
    if (!g || g->n_prb <= 0) continue;
    if (g->n_prb > left) throw std::logic_error("schedule_slot: grant exceeds remaining PRBs");
    out.entries.push_back({c.flow, c.cls, next, g->n_prb, g->mcs, g->tb_bits, c.tag});
    next += g->n_prb;
    served.push_back(c.flow);
  }
  return out;
}

}  // namespace xrtgr
