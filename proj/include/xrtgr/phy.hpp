#pragma once

// Link-to-system interface: MCS/CQI tables, transport block sizing, the block
// error model, chase and cross-link combining, and code block segmentation.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xrtgr/channel.hpp"
#include "xrtgr/config.hpp"
#include "xrtgr/rng.hpp"

namespace xrtgr {

struct McsEntry {
  int index;
  int modulation_order;  // bits per symbol
  double code_rate_x1024;
  double spectral_efficiency() const { return modulation_order * code_rate_x1024 / 1024.0; }
};

// 256QAM-capable PDSCH MCS table, indices 0..27. Mirrored in data/mcs_table_256qam.csv.
inline constexpr std::array<McsEntry, 28> kMcsTable{{
    {0, 2, 120},   {1, 2, 193},   {2, 2, 308},   {3, 2, 449},   {4, 2, 602},   {5, 4, 378},   {6, 4, 434},
    {7, 4, 490},   {8, 4, 553},   {9, 4, 616},   {10, 4, 658},  {11, 6, 466},  {12, 6, 517},  {13, 6, 567},
    {14, 6, 616},  {15, 6, 666},  {16, 6, 719},  {17, 6, 772},  {18, 6, 822},  {19, 6, 873},  {20, 8, 682.5},
    {21, 8, 711},  {22, 8, 754},  {23, 8, 797},  {24, 8, 841},  {25, 8, 885},  {26, 8, 916.5}, {27, 8, 948},
}};

inline constexpr int kMaxMcs = 27;
inline constexpr int kMaxCqi = 15;

// CQI k (k >= 2) is reported when the SINR supports the MCS with the same
// code point at 10% BLEP. CQI 1 has no MCS equivalent and acts as the floor.
inline constexpr std::array<int, 16> kCqiToMcs{{-1, -1, 1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27}};

inline int n_prb_for(double bandwidth_hz, double scs_hz) {
  static const std::map<int, std::map<int, int>> table{
      {15, {{5, 25}, {10, 52}, {15, 79}, {20, 106}, {25, 133}, {30, 160}, {40, 216}, {50, 270}}},
      {30, {{5, 11}, {10, 24}, {15, 38}, {20, 51}, {25, 65}, {30, 78}, {40, 106}, {50, 133}, {60, 162},
            {70, 189}, {80, 217}, {90, 245}, {100, 273}}},
      {60, {{10, 11}, {15, 18}, {20, 24}, {25, 31}, {30, 38}, {40, 51}, {50, 65}, {60, 79}, {70, 93},
            {80, 107}, {90, 121}, {100, 135}}},
  };
  const int scs = static_cast<int>(std::lround(scs_hz / 1e3));
  const int bw = static_cast<int>(std::lround(bandwidth_hz / 1e6));
  auto it = table.find(scs);
  if (it != table.end()) {
    auto jt = it->second.find(bw);
    if (jt != it->second.end()) return jt->second;
  }
  throw std::invalid_argument("unsupported bandwidth/subcarrier spacing combination");
}

// ---------------------------------------------------------------------------
// Transport block size

namespace detail {
inline constexpr std::array<int, 93> kSmallTbs{
    24,   32,   40,   48,   56,   64,   72,   80,   88,   96,   104,  112,  120,  128,  136,  144,
    152,  160,  168,  176,  184,  192,  208,  224,  240,  256,  272,  288,  304,  320,  336,  352,
    368,  384,  408,  432,  456,  480,  504,  528,  552,  576,  608,  640,  672,  704,  736,  768,
    808,  848,  888,  928,  984,  1032, 1064, 1128, 1160, 1192, 1224, 1256, 1288, 1320, 1352, 1416,
    1480, 1544, 1608, 1672, 1736, 1800, 1864, 1928, 2024, 2088, 2152, 2216, 2280, 2408, 2472, 2536,
    2600, 2664, 2728, 2792, 2856, 2976, 3104, 3240, 3368, 3496, 3624, 3752, 3824};
inline constexpr int kDmrsRePerPrb = 12;
}  // namespace detail

/// NR transport block size for one layer, one DMRS symbol and no extra overhead.
inline long tbs(int mcs, int n_prb, int n_data_symbols) {
  if (n_prb < 1) throw std::invalid_argument("tbs: n_prb must be >= 1");
  if (mcs < 0 || mcs > kMaxMcs) throw std::invalid_argument("tbs: mcs out of range");
  const auto& e = kMcsTable[mcs];
  const int re_per_prb = std::min(156, 12 * n_data_symbols - detail::kDmrsRePerPrb);
  if (re_per_prb <= 0) throw std::invalid_argument("tbs: not enough data symbols");
  const double rate = e.code_rate_x1024 / 1024.0;
  const double n_info = static_cast<double>(re_per_prb) * n_prb * rate * e.modulation_order;
  if (n_info <= 3824.0) {
    const int n = std::max(3, static_cast<int>(std::floor(std::log2(n_info))) - 6);
    const double p = std::ldexp(1.0, n);
    const double n_info_q = std::max(24.0, p * std::floor(n_info / p));
    for (int v : detail::kSmallTbs)
      if (v >= n_info_q) return v;
    return detail::kSmallTbs.back();
  }
  const int n = static_cast<int>(std::floor(std::log2(n_info - 24.0))) - 5;
  const double p = std::ldexp(1.0, n);
  const double n_info_q = std::max(3840.0, p * std::round((n_info - 24.0) / p));
  auto ceil_div = [](double a, double b) { return std::ceil(a / b); };
  if (rate <= 0.25) {
    const double c = ceil_div(n_info_q + 24.0, 3816.0);
    return static_cast<long>(8.0 * c * ceil_div(n_info_q + 24.0, 8.0 * c) - 24.0);
  }
  if (n_info_q > 8424.0) {
    const double c = ceil_div(n_info_q + 24.0, 8424.0);
    return static_cast<long>(8.0 * c * ceil_div(n_info_q + 24.0, 8.0 * c) - 24.0);
  }
  return static_cast<long>(8.0 * ceil_div(n_info_q + 24.0, 8.0) - 24.0);
}

/// tbs() memoized over every MCS, up to 275 PRBs and 14 symbols.
inline long tbs_cached(int mcs, int n_prb, int n_data_symbols) {
  constexpr int kPrb = 275;
  if (mcs < 0 || mcs > kMaxMcs || n_prb < 1 || n_prb > kPrb || n_data_symbols < 2 || n_data_symbols > 14)
    return tbs(mcs, n_prb, n_data_symbols);
  static const std::vector<long> table = [] {
    std::vector<long> t(15 * (kMaxMcs + 1) * (kPrb + 1), 0);
    for (int s = 2; s <= 14; ++s)
      for (int m = 0; m <= kMaxMcs; ++m)
        for (int n = 1; n <= kPrb; ++n) t[(s * (kMaxMcs + 1) + m) * (kPrb + 1) + n] = tbs(m, n, s);
    return t;
  }();
  return table[(n_data_symbols * (kMaxMcs + 1) + mcs) * (kPrb + 1) + n_prb];
}

/// Smallest PRB count whose TBS carries `bits`, capped at `max_prb`.
inline int prbs_for_bits(int mcs, long bits, int n_data_symbols, int max_prb) {
  if (max_prb < 1) return 0;
  if (tbs_cached(mcs, max_prb, n_data_symbols) < bits) return max_prb;
  int lo = 1, hi = max_prb;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (tbs_cached(mcs, mid, n_data_symbols) >= bits) hi = mid; else lo = mid + 1;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Combining

inline double chase_combine(std::span<const double> sinrs_db) {
  if (sinrs_db.empty()) throw std::invalid_argument("chase_combine: empty list");
  double sum = 0.0;
  for (double g : sinrs_db) sum += std::isinf(g) && g < 0 ? 0.0 : db_to_lin(g);
  return lin_to_db(sum);
}

/// Soft-value accumulation across the direct and the relayed reception. The
/// optional loss applies to the relayed branch.
inline double cross_link_combine(double gamma_x_db, double gamma_t_db, double loss_db = 0.0) {
  const double x = std::isinf(gamma_x_db) && gamma_x_db < 0 ? 0.0 : db_to_lin(gamma_x_db);
  const double t = std::isinf(gamma_t_db) && gamma_t_db < 0 ? 0.0 : db_to_lin(gamma_t_db - loss_db);
  return lin_to_db(x + t);
}

// ---------------------------------------------------------------------------
// Block error model

class BlepModel {
 public:
  static BlepModel parametric(double slope_db = 0.5, double ref_block_bits = 8448.0, double snr_gap_db = 2.0) {
    BlepModel m;
    m.mode_ = BlepMode::Parametric;
    m.slope_db_ = slope_db;
    m.ref_bits_ = ref_block_bits;
    for (int i = 0; i <= kMaxMcs; ++i)
      m.gamma_ref_[i] = gamma_for_efficiency(kMcsTable[i].spectral_efficiency(), snr_gap_db);
    m.build_cqi(snr_gap_db);
    return m;
  }

  /// LUT rows: mcs, sinr_dB, blep (at the reference block size). Linear
  /// interpolation in dB, clamped at the table ends.
  static BlepModel from_lut_stream(std::istream& in, double ref_block_bits = 8448.0) {
    BlepModel m;
    m.mode_ = BlepMode::FileLUT;
    m.ref_bits_ = ref_block_bits;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      int mcs;
      double sinr, p;
      if (!(ls >> mcs >> sinr >> p)) {
        if (line_no == 1) continue;  // header
        throw std::runtime_error("BLEP LUT: malformed row at line " + std::to_string(line_no));
      }
      if (mcs < 0 || mcs > kMaxMcs) throw std::runtime_error("BLEP LUT: mcs out of range at line " + std::to_string(line_no));
      m.lut_[mcs].emplace_back(sinr, std::clamp(p, 0.0, 1.0));
    }
    for (auto& rows : m.lut_) std::sort(rows.begin(), rows.end());
    for (int i = 0; i <= kMaxMcs; ++i)
      if (!m.lut_[i].empty()) m.gamma_ref_[i] = m.sinr_at_ref_blep(i, 0.1);
    m.build_cqi(2.0);
    return m;
  }

  static BlepModel from_lut_file(const std::string& path, double ref_block_bits = 8448.0) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open BLEP LUT '" + path + "'");
    return from_lut_stream(in, ref_block_bits);
  }

  static BlepModel from_config(const BlepConfig& c) {
    if (c.mode == BlepMode::FileLUT) return from_lut_file(c.lut_path, c.ref_block_bits);
    return parametric(c.slope_db, c.ref_block_bits, c.snr_gap_db);
  }

  static double gamma_for_efficiency(double se, double gap_db) {
    return lin_to_db(std::pow(2.0, se) - 1.0) + gap_db;
  }

  BlepMode mode() const { return mode_; }
  double ref_block_bits() const { return ref_bits_; }
  double slope_db() const { return slope_db_; }

  /// SINR at which BLEP at the reference size equals 10%.
  double gamma_ref(int mcs) const {
    check_mcs(mcs);
    return gamma_ref_[mcs];
  }

  double blep_ref(double sinr_db, int mcs) const {
    check_mcs(mcs);
    if (std::isinf(sinr_db)) return sinr_db < 0 ? 1.0 : 0.0;
    if (mode_ == BlepMode::Parametric) {
      // logistic anchored so that blep_ref(gamma_ref) = 0.1
      const double z = (sinr_db - gamma_ref_[mcs]) / slope_db_ + std::log(9.0);
      return 1.0 / (1.0 + std::exp(z));
    }
    return lut_lookup(mcs, sinr_db);
  }

  /// Block of `bits` treated as bits/ref independent reference blocks.
  double blep(double sinr_db, int mcs, double bits) const {
    const double b = blep_ref(sinr_db, mcs);
    const double ratio = bits / ref_bits_;
    if (ratio == 1.0) return b;
    if (b >= 1.0) return 1.0;
    return -std::expm1(ratio * std::log1p(-b));
  }

  double pdcch_blep(double sinr_db, double shift_db, double payload_bits) const {
    return blep(sinr_db + shift_db, 0, payload_bits);
  }

  /// CQI switching threshold (dB); index 1..15.
  double cqi_threshold(int cqi) const {
    if (cqi < 1 || cqi > kMaxCqi) throw std::out_of_range("cqi out of range");
    return cqi_thr_[cqi];
  }

  int cqi_from_sinr(double sinr_db) const {
    int cqi = 1;
    for (int k = 2; k <= kMaxCqi; ++k)
      if (sinr_db >= cqi_thr_[k]) cqi = k;
    return cqi;
  }

  double sinr_at_ref_blep(int mcs, double p) const {
    check_mcs(mcs);
    if (mode_ == BlepMode::Parametric)
      return gamma_ref_[mcs] + slope_db_ * (std::log((1.0 - p) / p) - std::log(9.0));
    double lo = -60.0, hi = 80.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (lut_lookup(mcs, mid) > p) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  void check_mcs(int mcs) const {
    if (mcs < 0 || mcs > kMaxMcs) throw std::out_of_range("mcs out of range");
    if (mode_ == BlepMode::FileLUT && lut_[mcs].empty())
      throw std::runtime_error("BLEP LUT has no entry for mcs " + std::to_string(mcs));
  }

  double lut_lookup(int mcs, double sinr_db) const {
    const auto& rows = lut_[mcs];
    if (rows.empty()) throw std::runtime_error("BLEP LUT has no entry for mcs " + std::to_string(mcs));
    if (sinr_db <= rows.front().first) return rows.front().second;
    if (sinr_db >= rows.back().first) return rows.back().second;
    auto it = std::lower_bound(rows.begin(), rows.end(), std::make_pair(sinr_db, -1.0));
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    if (x1 == x0) return y1;
    return y0 + (y1 - y0) * (sinr_db - x0) / (x1 - x0);
  }

  void build_cqi(double gap_db) {
    cqi_thr_[0] = -std::numeric_limits<double>::infinity();
    cqi_thr_[1] = mode_ == BlepMode::Parametric ? gamma_for_efficiency(78.0 * 2 / 1024.0, gap_db)
                                                : -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= kMaxCqi; ++k) {
      const int mcs = kCqiToMcs[k];
      cqi_thr_[k] = (mode_ == BlepMode::FileLUT && lut_[mcs].empty()) ? std::numeric_limits<double>::infinity()
                                                                       : gamma_ref_[mcs];
    }
  }

  BlepMode mode_{BlepMode::Parametric};
  double slope_db_{0.5};
  double ref_bits_{8448.0};
  std::array<double, kMaxMcs + 1> gamma_ref_{};
  std::array<double, kMaxCqi + 1> cqi_thr_{};
  std::array<std::vector<std::pair<double, double>>, kMaxMcs + 1> lut_;
};

// ---------------------------------------------------------------------------
// Code block segmentation

inline constexpr int kMaxCbBits = 8448;
inline constexpr int kCrcBits = 24;

struct CodeBlock {
  int index{0};
  int size_bits{0};
  int cbg{0};
};

struct Segmentation {
  std::vector<CodeBlock> cbs;
  int n_cbg{1};

  int cbg_bits(int g) const {
    int s = 0;
    for (const auto& cb : cbs)
      if (cb.cbg == g) s += cb.size_bits;
    return s;
  }
};

/// LDPC-style segmentation (TB CRC, per-CB CRC above the max CB size); CBs
/// are dealt round-robin over min(max_cbgs, C) groups.
inline Segmentation segment_tb(long tb_bits, int max_cbgs = 8) {
  if (tb_bits <= 0) throw std::invalid_argument("segment_tb: tb_size must be > 0");
  const long b = tb_bits + kCrcBits;
  long c = 1;
  long total = b;
  if (b > kMaxCbBits) {
    c = (b + (kMaxCbBits - kCrcBits) - 1) / (kMaxCbBits - kCrcBits);
    total = b + kCrcBits * c;
  }
  Segmentation s;
  s.n_cbg = static_cast<int>(std::min<long>(max_cbgs, c));
  const long base = total / c;
  const long rem = total % c;
  for (long i = 0; i < c; ++i) {
    CodeBlock cb;
    cb.index = static_cast<int>(i);
    cb.size_bits = static_cast<int>(base + (i < rem ? 1 : 0));
    cb.cbg = static_cast<int>(i % s.n_cbg);
    s.cbs.push_back(cb);
  }
  return s;
}

/// Zero-mean per-CB SINR perturbations, drawn once per TB and receiver.
inline std::vector<double> draw_cb_offsets(std::size_t n, double variance_db2, RngStream& rng) {
  std::vector<double> out(n, 0.0);
  if (variance_db2 <= 0.0) return out;
  const double sd = std::sqrt(variance_db2);
  for (auto& v : out) v = sd * rng.normal();
  return out;
}

inline double per_cb_sinr(double tb_sinr_db, std::span<const double> offsets, std::size_t cb_index) {
  return tb_sinr_db + offsets[cb_index];
}

/// TB error probability composed from its code blocks.
inline double tb_blep(const BlepModel& m, std::span<const double> cb_sinr_db, int mcs, const Segmentation& seg) {
  if (!cb_sinr_db.empty() &&
      std::all_of(cb_sinr_db.begin(), cb_sinr_db.end(), [&](double g) { return g == cb_sinr_db.front(); })) {
    double bits = 0.0;
    for (const auto& cb : seg.cbs) bits += cb.size_bits;
    return m.blep(cb_sinr_db.front(), mcs, bits);
  }
  double ok = 1.0;
  for (std::size_t i = 0; i < seg.cbs.size(); ++i) ok *= 1.0 - m.blep(cb_sinr_db[i], mcs, seg.cbs[i].size_bits);
  return 1.0 - ok;
}

}  // namespace xrtgr
