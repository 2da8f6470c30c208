#pragma once

// Scheme labels and user-load sweeps with matched seeds across schemes.

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrtgr/config.hpp"
#include "xrtgr/engine.hpp"
#include "xrtgr/kpi.hpp"

namespace xrtgr {

/// Scheme label grammar: base ("legacy", "SCS", "SSCS") followed by any of
/// "-UEX", "-Best", "-CBG", "-CBsUEX<pct>", "-CBsUET<pct>". The limited-CB
/// modifiers imply CBG.
struct SchemeSpec {
  std::string label;
  UserMode user_mode{UserMode::TGr};
  CoopScheme coop{CoopScheme::SSCS};
  CsiMode csi{CsiMode::Best};
  CbMode cb{CbMode::TB};
  LimitedCbVariant limited{LimitedCbVariant::None};
  double fraction{1.0};
};

inline SchemeSpec parse_scheme(const std::string& label) {
  SchemeSpec s;
  s.label = label;
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = label.find('-', start);
    parts.push_back(label.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  const std::string& base = parts.front();
  if (base == "legacy") {
    s.user_mode = UserMode::LegacyXR;
    s.coop = CoopScheme::None;
    s.csi = CsiMode::UEX;
  } else if (base == "SCS") {
    s.coop = CoopScheme::SCS;
  } else if (base == "SSCS") {
    s.coop = CoopScheme::SSCS;
  } else {
    throw ConfigError("unknown scheme '" + label + "'");
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& m = parts[i];
    auto pct = [&](const std::string& prefix) {
      const std::string num = m.substr(prefix.size());
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(num, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (num.empty() || used != num.size() || v <= 0 || v > 100)
        throw ConfigError("bad percentage in scheme modifier '" + m + "'");
      return v / 100.0;
    };
    if (m == "UEX") {
      s.csi = CsiMode::UEX;
    } else if (m == "Best") {
      if (s.user_mode == UserMode::LegacyXR) throw ConfigError("legacy users have no CSI-Best mode");
      s.csi = CsiMode::Best;
    } else if (m == "CBG") {
      s.cb = CbMode::CBG;
    } else if (m.rfind("CBsUEX", 0) == 0) {
      s.cb = CbMode::CBG;
      s.limited = LimitedCbVariant::CBsUEX;
      s.fraction = pct("CBsUEX");
    } else if (m.rfind("CBsUET", 0) == 0) {
      s.cb = CbMode::CBG;
      s.limited = LimitedCbVariant::CBsUET;
      s.fraction = pct("CBsUET");
    } else {
      throw ConfigError("unknown scheme modifier '" + m + "' in '" + label + "'");
    }
  }
  if (s.limited != LimitedCbVariant::None && s.coop != CoopScheme::SSCS)
    throw ConfigError("limited-CB modifiers need SSCS: '" + label + "'");
  return s;
}

/// Config for one scheme. Switching the CB mode also switches the target
/// BLER to that mode's default and re-derives the down step.
inline ScenarioConfig apply_scheme(ScenarioConfig cfg, const SchemeSpec& s) {
  const CbMode before = cfg.cb_mode;
  cfg.user_mode = s.user_mode;
  cfg.coop_scheme = s.coop;
  cfg.csi_mode = s.csi;
  cfg.cb_mode = s.cb;
  cfg.limited_cb.variant = s.limited;
  cfg.limited_cb.fraction = s.fraction;
  if (before != s.cb) {
    cfg.target_bler = s.cb == CbMode::CBG ? 0.30 : 0.10;
    cfg.olla.delta_down_db = auto_delta_down(cfg.olla.delta_up_db, cfg.target_bler);
  }
  return cfg;
}

/// Inverse of parse_scheme for a loaded config.
inline std::string scheme_label(const ScenarioConfig& cfg) {
  std::string s = cfg.user_mode == UserMode::LegacyXR ? "legacy" : to_string(cfg.coop_scheme);
  if (cfg.user_mode == UserMode::TGr && cfg.csi_mode == CsiMode::UEX) s += "-UEX";
  if (cfg.limited_cb.variant != LimitedCbVariant::None) {
    s += std::string("-") + to_string(cfg.limited_cb.variant) +
         std::to_string(static_cast<int>(std::lround(cfg.limited_cb.fraction * 100.0)));
  } else if (cfg.cb_mode == CbMode::CBG) {
    s += "-CBG";
  }
  return s;
}

struct UserRange {
  int lo{1};
  int hi{10};
};

/// "a..b" or a single number.
inline UserRange parse_user_range(const std::string& text) {
  UserRange r;
  try {
    const auto pos = text.find("..");
    std::size_t used = 0;
    if (pos == std::string::npos) {
      r.lo = r.hi = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      const std::string a = text.substr(0, pos), b = text.substr(pos + 2);
      r.lo = std::stoi(a, &used);
      if (used != a.size()) throw std::invalid_argument(text);
      r.hi = std::stoi(b, &used);
      if (used != b.size()) throw std::invalid_argument(text);
    }
  } catch (const std::exception&) {
    throw ConfigError("bad user range '" + text + "' (expected a..b)");
  }
  if (r.lo < 0 || r.lo > r.hi) throw ConfigError("bad user range '" + text + "': need 0 <= a <= b");
  return r;
}

struct SweepSpec {
  UserRange users;
  std::vector<std::string> schemes{"legacy", "SCS", "SSCS"};
  std::vector<double> pdbs_ms{10.0};
  int parallel{1};
};

struct SweepCell {
  std::string scheme;
  CsiMode csi{CsiMode::Best};
  double pdb_ms{0.0};
  int users_per_cell{0};
  CampaignSummary summary;
};

struct SweepCurve {
  std::string scheme;
  CsiMode csi{CsiMode::Best};
  CapacityCurve curve;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepCurve> curves;

  const SweepCell& at(const std::string& scheme, double pdb_ms, int users) const {
    for (const auto& c : cells)
      if (c.scheme == scheme && c.pdb_ms == pdb_ms && c.users_per_cell == users) return c;
    throw std::out_of_range("no sweep cell for " + scheme);
  }

  const CapacityCurve& curve(const std::string& scheme, double pdb_ms) const {
    for (const auto& c : curves)
      if (c.scheme == scheme && c.curve.pdb_ms == pdb_ms) return c.curve;
    throw std::out_of_range("no capacity curve for " + scheme);
  }
};

using SweepProgressFn = std::function<void(const std::string& scheme, double pdb_ms, int users)>;

/// Every (scheme, PDB, load) point runs the same drop seeds.
inline SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec, const SweepProgressFn& progress = {}) {
  if (spec.schemes.empty()) throw ConfigError("sweep needs at least one scheme");
  if (spec.pdbs_ms.empty()) throw ConfigError("sweep needs at least one PDB");
  SweepResult out;
  for (const auto& label : spec.schemes) {
    const SchemeSpec sch = parse_scheme(label);
    for (double pdb : spec.pdbs_ms) {
      std::vector<CapacityPoint> pts;
      for (int u = spec.users.lo; u <= spec.users.hi; ++u) {
        ScenarioConfig cfg = apply_scheme(base, sch);
        cfg.pdb_ms = pdb;
        cfg.users_per_cell = u;
        if (progress) progress(label, pdb, u);
        const auto drops = run_campaign(cfg, spec.parallel);
        SweepCell cell{label, sch.csi, pdb, u, summarize(drops)};
        pts.push_back({u, cell.summary.satisfied_fraction});
        out.cells.push_back(std::move(cell));
      }
      out.curves.push_back({label, sch.csi, xr_capacity(pts, pdb)});
    }
  }
  return out;
}

}  // namespace xrtgr
