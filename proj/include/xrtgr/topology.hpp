#pragma once

// Network drops: cell layout for the two deployments and reproducible user
// placement with uniform per-cell load.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "xrtgr/channel.hpp"
#include "xrtgr/config.hpp"
#include "xrtgr/rng.hpp"

namespace xrtgr {

struct Vec2 {
  double x{0.0};
  double y{0.0};
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Cell {
  int id{0};
  int site{0};
  Vec2 pos;
  double height_m{3.0};
  std::optional<double> bearing_deg;  // sectorized cells only
};

struct UeRecord {
  int id{0};  // global id, keys the UE's random substreams
  Vec2 pos;
  double height_m{1.5};
  bool indoor{true};
  int floor{1};
  int serving_cell{0};
  std::vector<bool> los;            // per cell
  std::vector<double> shadow_db;    // per cell
  std::vector<double> rx_power_dbm; // per cell, before beamforming gain
};

struct TetheringGroup {
  int id{0};
  int cell{0};
  UeRecord ue_x;
  std::optional<UeRecord> ue_t;  // absent for legacy XR users
};

struct Topology {
  std::vector<Cell> cells;
  std::vector<TetheringGroup> groups;
  std::vector<UeRecord> embb_ues;
  double area_x_m{0.0};
  double area_y_m{0.0};
};

inline int tether_ue_id(int group) { return 2 * group + 1; }
inline int xr_ue_id(int group) { return 2 * group; }
inline int embb_ue_id(int k) { return 1'000'000 + k; }

/// InH: a 2 x 6 grid, filled row by row when fewer cells are configured.
inline std::vector<Cell> make_cells(const ScenarioConfig& cfg) {
  std::vector<Cell> cells;
  if (cfg.deployment == Deployment::InH) {
    const double isd = cfg.inter_site_distance_m;
    const double y0 = cfg.area_y_m / 2.0 - isd / 2.0;
    const double x0 = cfg.area_x_m / 2.0 - 2.5 * isd;
    int id = 0;
    for (int row = 0; row < 2; ++row)
      for (int col = 0; col < 6 && id < cfg.cells; ++col) {
        Cell c;
        c.id = id;
        c.site = id;
        c.pos = {x0 + col * isd, y0 + row * isd};
        c.height_m = cfg.gnb_height_m;
        cells.push_back(c);
        ++id;
      }
    return cells;
  }
  const Vec2 centre{cfg.area_x_m / 2.0, cfg.area_y_m / 2.0};
  std::vector<Vec2> sites{centre};
  for (int k = 0; k < 6; ++k) {
    const double a = (30.0 + 60.0 * k) * std::numbers::pi / 180.0;
    sites.push_back({centre.x + cfg.inter_site_distance_m * std::cos(a), centre.y + cfg.inter_site_distance_m * std::sin(a)});
  }
  int id = 0;
  for (int s = 0; s < static_cast<int>(sites.size()); ++s)
    for (double bearing : {30.0, 150.0, 270.0}) {
      Cell c;
      c.id = id++;
      c.site = s;
      c.pos = sites[s];
      c.height_m = cfg.gnb_height_m;
      c.bearing_deg = bearing;
      cells.push_back(c);
    }
  return cells;
}

namespace detail {

inline double wrap_deg(double a) {
  while (a > 180.0) a -= 360.0;
  while (a < -180.0) a += 360.0;
  return a;
}

inline double antenna_gain_db(const Cell& cell, const UeRecord& ue) {
  if (!cell.bearing_deg) return 0.0;
  const double az = std::atan2(ue.pos.y - cell.pos.y, ue.pos.x - cell.pos.x) * 180.0 / std::numbers::pi;
  const double phi = wrap_deg(az - *cell.bearing_deg);
  const double d2d = std::max(distance(ue.pos, cell.pos), 1e-3);
  const double theta = 90.0 + std::atan2(cell.height_m - ue.height_m, d2d) * 180.0 / std::numbers::pi;
  return sector_antenna_gain_db(phi, theta);
}

inline LinkGeometry geometry(const Cell& cell, const UeRecord& ue) {
  LinkGeometry g;
  g.d2d_m = distance(ue.pos, cell.pos);
  const double dh = cell.height_m - ue.height_m;
  g.d3d_m = std::sqrt(g.d2d_m * g.d2d_m + dh * dh);
  g.h_bs_m = cell.height_m;
  g.h_ut_m = ue.height_m;
  return g;
}

inline bool inside(const ScenarioConfig& cfg, Vec2 p) {
  return p.x >= 0.0 && p.x <= cfg.area_x_m && p.y >= 0.0 && p.y <= cfg.area_y_m;
}

inline bool far_enough(const ScenarioConfig& cfg, const std::vector<Cell>& cells, Vec2 p) {
  if (cfg.min_distance_m <= 0.0) return true;
  for (const auto& c : cells)
    if (distance(p, c.pos) < cfg.min_distance_m) return false;
  return true;
}

// Fill per-cell received powers from LOS / shadowing already drawn.
inline void finish_links(const ScenarioConfig& cfg, const std::vector<Cell>& cells, UeRecord& ue) {
  ue.rx_power_dbm.assign(cells.size(), 0.0);
  const double o2i = (cfg.deployment == Deployment::DU && ue.indoor) ? cfg.channel.o2i_loss_db : 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto g = geometry(cells[k], ue);
    const double pl = pathloss_db(g, cfg.deployment, ue.los[k], cfg.carrier_hz);
    ue.rx_power_dbm[k] = cfg.gnb_power_dbm - pl - ue.shadow_db[k] + antenna_gain_db(cells[k], ue) - o2i;
  }
}

inline void draw_indoor_state(const ScenarioConfig& cfg, RngStream& rng, UeRecord& ue) {
  ue.indoor = rng.bernoulli(cfg.indoor_probability);
  ue.floor = ue.indoor && cfg.floors > 1 ? rng.uniform_int(1, cfg.floors) : 1;
  ue.height_m = cfg.deployment == Deployment::DU ? 3.0 * (ue.floor - 1) + cfg.channel.ue_height_m : cfg.channel.ue_height_m;
}

// Independent link state draws; returns the standard-normal shadowing seeds
// and LOS uniforms so a tethered partner can be correlated with them.
struct LinkSeeds {
  std::vector<double> los_u;
  std::vector<double> shadow_z;
};

inline LinkSeeds draw_links(const ScenarioConfig& cfg, const std::vector<Cell>& cells, RngStream& rng, UeRecord& ue) {
  LinkSeeds s;
  ue.los.assign(cells.size(), true);
  ue.shadow_db.assign(cells.size(), 0.0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double u = rng.uniform();
    const double z = rng.normal();
    s.los_u.push_back(u);
    s.shadow_z.push_back(z);
    const double d2d = distance(ue.pos, cells[k].pos);
    ue.los[k] = cfg.channel.force_los || u < los_probability(cfg.deployment, d2d, ue.height_m);
    ue.shadow_db[k] = shadowing_sigma_db(cfg.deployment, ue.los[k]) * z;
  }
  finish_links(cfg, cells, ue);
  return s;
}

inline int strongest_cell(const UeRecord& ue) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(ue.rx_power_dbm.size()); ++k)
    if (ue.rx_power_dbm[k] > ue.rx_power_dbm[best]) best = k;
  return best;
}

struct PlacedUe {
  UeRecord ue;
  LinkSeeds seeds;
};

// Uniform positions in the area, accepted while the strongest cell still
// needs users, until every cell holds `per_cell`.
inline std::vector<PlacedUe> place_uniform_per_cell(const ScenarioConfig& cfg, const std::vector<Cell>& cells,
                                                    int per_cell, RngStream& rng) {
  std::vector<PlacedUe> out;
  if (per_cell <= 0) return out;
  std::vector<int> count(cells.size(), 0);
  const std::size_t needed = cells.size() * static_cast<std::size_t>(per_cell);
  long attempts = 0;
  const long max_attempts = 2'000'000;
  while (out.size() < needed) {
    if (++attempts > max_attempts) throw std::runtime_error("user placement did not converge");
    PlacedUe p;
    p.ue.pos = {rng.uniform(0.0, cfg.area_x_m), rng.uniform(0.0, cfg.area_y_m)};
    if (!far_enough(cfg, cells, p.ue.pos)) continue;
    draw_indoor_state(cfg, rng, p.ue);
    p.seeds = draw_links(cfg, cells, rng, p.ue);
    const int best = strongest_cell(p.ue);
    if (count[best] >= per_cell) continue;
    ++count[best];
    p.ue.serving_cell = best;
    out.push_back(std::move(p));
  }
  return out;
}

inline UeRecord place_tether(const ScenarioConfig& cfg, const std::vector<Cell>& cells, const PlacedUe& x, RngStream& rng) {
  UeRecord t;
  for (int tries = 0;; ++tries) {
    if (tries > 10000) throw std::runtime_error("tether placement did not converge");
    const double bearing = rng.uniform(0.0, 2.0 * std::numbers::pi);
    t.pos = {x.ue.pos.x + cfg.intra_tgr_distance_m * std::cos(bearing),
             x.ue.pos.y + cfg.intra_tgr_distance_m * std::sin(bearing)};
    if (inside(cfg, t.pos)) break;
  }
  t.indoor = x.ue.indoor;
  t.floor = x.ue.floor;
  t.height_m = x.ue.height_m;
  const double rho = cfg.channel.shadowing_correlation;
  t.los.assign(cells.size(), true);
  t.shadow_db.assign(cells.size(), 0.0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double u = rng.uniform() < cfg.channel.los_correlation ? x.seeds.los_u[k] : rng.uniform();
    const double w = rng.normal();
    const double z = rho * x.seeds.shadow_z[k] + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * w;
    const double d2d = distance(t.pos, cells[k].pos);
    t.los[k] = cfg.channel.force_los || u < los_probability(cfg.deployment, d2d, t.height_m);
    t.shadow_db[k] = shadowing_sigma_db(cfg.deployment, t.los[k]) * z;
  }
  finish_links(cfg, cells, t);
  t.serving_cell = x.ue.serving_cell;
  return t;
}

}  // namespace detail

/// Pure function of (config, drop seed).
inline Topology generate_drop(const ScenarioConfig& cfg, std::uint64_t drop_seed) {
  validate(cfg);
  Topology topo;
  topo.area_x_m = cfg.area_x_m;
  topo.area_y_m = cfg.area_y_m;
  topo.cells = make_cells(cfg);

  RngStream placement(drop_seed, entity_id(EntityKind::Drop, 0), Purpose::Placement);
  auto xs = detail::place_uniform_per_cell(cfg, topo.cells, cfg.users_per_cell, placement);
  for (std::size_t g = 0; g < xs.size(); ++g) {
    TetheringGroup grp;
    grp.id = static_cast<int>(g);
    grp.cell = xs[g].ue.serving_cell;
    grp.ue_x = xs[g].ue;
    grp.ue_x.id = xr_ue_id(grp.id);
    if (cfg.user_mode == UserMode::TGr) {
      RngStream trng(drop_seed, entity_id(EntityKind::Group, g), Purpose::TetherPlacement);
      grp.ue_t = detail::place_tether(cfg, topo.cells, xs[g], trng);
      grp.ue_t->id = tether_ue_id(grp.id);
    }
    topo.groups.push_back(std::move(grp));
  }

  RngStream embb_rng(drop_seed, entity_id(EntityKind::Drop, 0), Purpose::Embb);
  auto es = detail::place_uniform_per_cell(cfg, topo.cells, cfg.embb_users_per_cell, embb_rng);
  for (std::size_t k = 0; k < es.size(); ++k) {
    es[k].ue.id = embb_ue_id(static_cast<int>(k));
    topo.embb_ues.push_back(std::move(es[k].ue));
  }
  return topo;
}

}  // namespace xrtgr
