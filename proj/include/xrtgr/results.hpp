#pragma once

// Raw per-drop outputs of the simulator.

#include <array>
#include <cstdint>
#include <vector>

#include "xrtgr/link_adaptation.hpp"
#include "xrtgr/phy.hpp"
#include "xrtgr/traffic.hpp"

namespace xrtgr {

/// Serving-link propagation status of a group: both LOS, only UE-X LOS,
/// only UE-T LOS, both NLOS.
enum class PropagationStatus { BothLos = 0, XLosOnly = 1, TLosOnly = 2, BothNlos = 3 };

struct TetherVolume {
  long long decoded_bits{0};  // forwarded TBs / CBs
  long long soft_bits{0};     // forwarded soft values (coded bits x LLR width)
  long long index_bits{0};    // CB index signalling of the limited schemes
};

struct DropResult {
  std::uint64_t seed{0};
  long slots{0};
  double duration_ms{0.0};
  double warmup_ms{0.0};
  int cells{0};
  int total_prbs{0};

  // XR flows (one per group)
  std::vector<std::vector<XrFrame>> frames;
  std::vector<int> flow_cell;
  std::vector<long> flow_counted;  // frames inside the KPI window
  std::vector<long> flow_on_time;  // of those, delivered by their deadline
  std::vector<double> final_olla_offset_db;

  // per cell, DL-capable slots after warm-up
  std::vector<double> cell_prb_fraction_sum;
  std::vector<long> cell_dl_slots;

  std::array<long, 10> scenario_counts{};            // index 1..9
  std::array<long, 4> propagation_status{};          // per group
  std::array<long, kMaxMcs + 1> xr_initial_mcs{};    // after warm-up
  std::array<std::array<long, 4>, 10> retx_causes{}; // [scenario][hf_x2 of the failed transmission]

  long xr_initial_tx{0};
  long xr_retx{0};
  long embb_initial_tx{0};
  long embb_retx{0};
  long xr_new_prbs{0};
  long xr_retx_prbs{0};
  long xr_retx_full_tb_prbs{0};  // PRBs a full-TB retransmission would have needed
  long xr_tb_dropped{0};
  long initial_tx_kpi{0};        // initial XR transmissions after warm-up
  long initial_nack_kpi{0};      // of those, negative joint feedback

  TetherVolume tether;

  std::vector<int> embb_cell;
  std::vector<double> embb_served_bits;  // after warm-up

  long long generated_bits{0};
  long long delivered_bits{0};
  long long lost_bits{0};
  long long in_flight_bits{0};
  long long queued_bits{0};

  bool conserved() const { return delivered_bits + lost_bits + in_flight_bits + queued_bits == generated_bits; }
};

/// Frames that count toward the KPIs: arrived after warm-up and due before the end.
inline bool in_kpi_window(const XrFrame& f, double warmup_ms, double duration_ms) {
  return f.arrival_ms >= warmup_ms && f.deadline_ms <= duration_ms;
}

inline int harq_index(Harq h) { return static_cast<int>(h); }

}  // namespace xrtgr
