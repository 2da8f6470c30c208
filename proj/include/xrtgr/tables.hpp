#pragma once

// Exhaustive check of the cooperation and joint-HARQ decision tables: every
// decoding scenario under SCS and SSCS (both outcomes of the soft-combining
// row) is pushed through the resolver and compared with the reference rows.

#include <optional>
#include <string>
#include <vector>

#include "xrtgr/harq.hpp"
#include "xrtgr/link_adaptation.hpp"

namespace xrtgr {

struct TableRow {
  int scenario{0};
  CoopScheme scheme{CoopScheme::SCS};
  std::optional<Harq> soft_outcome;  // the HF_X2 branch, soft-combining rows only

  Relay expected_relay{Relay::None};
  XAction expected_action{XAction::None};
  bool expected_retx{false};
  Harq expected_direction{Harq::ACK};

  Relay relay{Relay::None};
  XAction action{XAction::None};
  bool retx{false};
  Harq direction{Harq::ACK};

  bool pass() const {
    return relay == expected_relay && action == expected_action && retx == expected_retx &&
           direction == expected_direction;
  }
};

namespace detail {

struct ReferenceRow {
  int scenario;
  CoopScheme scheme;
  std::optional<Harq> soft_outcome;
  Relay relay;
  XAction action;
  bool retx;
};

inline std::vector<ReferenceRow> reference_rows() {
  using R = Relay;
  using A = XAction;
  const auto S = CoopScheme::SCS;
  const auto SS = CoopScheme::SSCS;
  return {
      {1, S, {}, R::DecodedTb, A::DiscardTb, false},
      {2, S, {}, R::DecodedTb, A::UseTb, false},
      {3, S, {}, R::DecodedTb, A::UseTb, false},
      {4, S, {}, R::None, A::None, false},
      {5, S, {}, R::None, A::None, true},
      {6, S, {}, R::None, A::None, true},
      {7, S, {}, R::None, A::None, false},
      {8, S, {}, R::None, A::None, true},
      {9, S, {}, R::None, A::None, true},
      {1, SS, {}, R::DecodedTb, A::DiscardTb, false},
      {2, SS, {}, R::DecodedTb, A::UseTb, false},
      {3, SS, {}, R::DecodedTb, A::UseTb, false},
      {4, SS, {}, R::SoftTb, A::DiscardSoft, false},
      {5, SS, Harq::ACK, R::SoftTb, A::SoftCombine, false},
      {5, SS, Harq::NACK, R::SoftTb, A::SoftCombine, true},
      {6, SS, {}, R::SoftTb, A::DiscardSoft, true},
      {7, SS, {}, R::None, A::None, false},
      {8, SS, {}, R::None, A::None, true},
      {9, SS, {}, R::None, A::None, true},
  };
}

/// Receiver outcome for one side of a scenario: 0 = decoded, 1 = PDSCH
/// failed, 2 = PDCCH missed.
inline DecodeOutcome outcome_for(int status) {
  DecodeOutcome o;
  o.pdcch_ok = status != 2;
  o.pdsch_ok = status == 0;
  o.uniforms = {0.5};
  return o;
}

}  // namespace detail

/// Runs every reference row through the cooperation resolver and the joint
/// feedback function `resolver`.
inline std::vector<TableRow> validate_tables(const JointFeedbackFn& resolver = joint_feedback) {
  std::vector<TableRow> rows;
  for (const auto& ref : detail::reference_rows()) {
    TableRow row;
    row.scenario = ref.scenario;
    row.scheme = ref.scheme;
    row.soft_outcome = ref.soft_outcome;
    row.expected_relay = ref.relay;
    row.expected_action = ref.action;
    row.expected_retx = ref.retx;
    row.expected_direction = ref.retx ? Harq::NACK : Harq::ACK;

    const DecodeOutcome t = detail::outcome_for((ref.scenario - 1) / 3);
    const DecodeOutcome x = detail::outcome_for((ref.scenario - 1) % 3);
    const bool soft_ok = ref.soft_outcome.value_or(Harq::NACK) == Harq::ACK;
    const CoopResult r = cooperate_tb(ref.scheme, t, x, [&] { return soft_ok; });
    const RetxDecision d = needs_retransmission(ref.scheme, r.hf_x1, r.hf_t1, r.hf_x2, resolver);
    row.relay = r.relay;
    row.action = r.x_action;
    row.retx = d.retransmit;
    row.direction = d.hf_j;
    rows.push_back(row);
  }
  return rows;
}

inline std::string direction_label(Harq h) { return h == Harq::ACK ? "down" : "up"; }

}  // namespace xrtgr
