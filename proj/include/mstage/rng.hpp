#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mstage {

// splitmix64 step (Steele-Lea-Flood / Vigna fixed-increment variant).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// xoshiro256++ stream with Box-Muller normals.
//
// std::<random> distributions are implementation-defined, which would break
// the cross-platform reproducibility contract, so draws are produced here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on [0,1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so the log is finite
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mu, double sd) { return mu + sd * normal(); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4]{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Independent reproducible stream for one replication of one experiment.
// Splitting rule: absorb the experiment id (FNV-1a) and the replication
// counter into a splitmix64 state seeded by the master seed; the scrambled
// output keys the xoshiro stream. Identical inputs give identical streams
// on every platform.
inline Rng derive_stream(std::uint64_t master_seed, std::string_view experiment_id,
                         std::uint64_t replication) {
  std::uint64_t st = master_seed;
  std::uint64_t key = splitmix64_next(st);
  st ^= fnv1a64(experiment_id);
  key ^= splitmix64_next(st);
  st ^= replication * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL;
  key ^= splitmix64_next(st);
  return Rng(key);
}

}  // namespace mstage
