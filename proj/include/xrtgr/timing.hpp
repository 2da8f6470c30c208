#pragma once

// Symbol-level timeline of the TDD frame: transmission end, HARQ feedback
// occasions and the earliest slot in which the gNB can act on feedback.

#include <cmath>
#include <stdexcept>
#include <string>

#include "xrtgr/config.hpp"
#include "xrtgr/scheduler.hpp"

namespace xrtgr {

inline constexpr int kSymbolsPerSlot = 14;
inline constexpr int kGuardSymbolsS = 2;

class FrameClock {
 public:
  explicit FrameClock(const ScenarioConfig& cfg)
      : pattern_(cfg.tdd_pattern),
        dl_s_(cfg.dl_symbols_s),
        slot_ms_(cfg.slot_ms()),
        ue_proc_(static_cast<long>(std::ceil(cfg.harq.ue_proc_symbols))),
        gnb_proc_(static_cast<long>(std::ceil(cfg.harq.gnb_proc_symbols))) {}

  double slot_ms() const { return slot_ms_; }
  double symbol_ms() const { return slot_ms_ / kSymbolsPerSlot; }
  SlotType type(long slot) const { return slot_type(slot, pattern_); }

  /// Symbol index right after the last PDSCH symbol of a slot.
  long tx_end_symbol(long slot) const {
    const SlotType t = type(slot);
    if (t == SlotType::U) throw std::invalid_argument("no downlink in an uplink slot");
    return slot * kSymbolsPerSlot + (t == SlotType::D ? kSymbolsPerSlot : dl_s_);
  }

  /// First uplink symbol at or after `symbol`.
  long next_ul_symbol(long symbol) const {
    const long first = symbol / kSymbolsPerSlot;
    for (long slot = first;; ++slot) {
      if (slot - first > 2 * static_cast<long>(pattern_.size()))
        throw std::logic_error("TDD pattern has no uplink symbol");
      const long start = slot * kSymbolsPerSlot;
      const SlotType t = type(slot);
      long first_ul = -1;
      if (t == SlotType::U) first_ul = start;
      else if (t == SlotType::S && dl_s_ + kGuardSymbolsS < kSymbolsPerSlot) first_ul = start + dl_s_ + kGuardSymbolsS;
      if (first_ul < 0) continue;
      const long cand = std::max(symbol, first_ul);
      if (cand < start + kSymbolsPerSlot) return cand;
    }
  }

  /// First DL-capable slot starting at or after `symbol`.
  long next_dl_slot_at(long symbol) const {
    long slot = (symbol + kSymbolsPerSlot - 1) / kSymbolsPerSlot;
    while (!dl_capable(type(slot))) ++slot;
    return slot;
  }

  /// Symbol at which a UE that finished decoding at `ready_symbol` has its
  /// HARQ feedback sent.
  long feedback_symbol(long ready_symbol) const { return next_ul_symbol(ready_symbol); }

  /// Decode finished at the UE (relative to transmission end).
  long ue_ready_symbol(long tx_end) const { return tx_end + ue_proc_; }

  /// Slot in which the gNB can use feedback sent in `fb_symbol`.
  long gnb_action_slot(long fb_symbol) const { return next_dl_slot_at(fb_symbol + 1 + gnb_proc_); }

  double symbol_to_ms(long symbol) const { return static_cast<double>(symbol) * symbol_ms(); }

  long ue_proc_symbols() const { return ue_proc_; }

 private:
  std::string pattern_;
  int dl_s_;
  double slot_ms_;
  long ue_proc_;
  long gnb_proc_;
};

}  // namespace xrtgr
