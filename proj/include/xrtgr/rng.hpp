#pragma once

// Named random substreams. Every stochastic draw in a drop comes from a
// stream keyed by (root seed, entity kind, entity id, purpose) so that the
// number of draws one subsystem makes never shifts another subsystem's
// sequence.

#include <cstdint>
#include <random>
#include <string_view>

namespace xrtgr {

enum class Purpose : std::uint32_t {
  Placement = 1,
  TetherPlacement,
  LinkState,
  Fading,
  Traffic,
  Decode,
  PdcchDecode,
  CbOffset,
  Embb,
  Test,
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t entity,
                                    Purpose purpose) {
  std::uint64_t h = detail::splitmix64(root);
  h = detail::splitmix64(h ^ entity);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t root, std::uint64_t entity, Purpose purpose)
      : engine_(derive_seed(root, entity, purpose)) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return normal_(engine_); }
  double normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Entity ids are packed as (kind << 32 | index) to keep streams disjoint.
enum class EntityKind : std::uint64_t { Drop = 1, Ue, Group, Cell, Flow };

constexpr std::uint64_t entity_id(EntityKind kind, std::uint64_t index) {
  return (static_cast<std::uint64_t>(kind) << 32) | (index & 0xFFFFFFFFULL);
}

}  // namespace xrtgr
