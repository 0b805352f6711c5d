#pragma once

#include <cstdint>
#include <random>

#include "relosc/types.hpp"

namespace relosc {

/// Seeded random source with hand-rolled uniform/normal draws, so that byte
/// streams do not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0,1).
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Standard normal via Box-Muller.
  double normal();

  Vec normal_vec(int n);
  /// Uniform over the solid ball of the given radius.
  Vec ball_point(int n, double radius);
  Vec sphere_point(int n, double radius);

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Derive an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// k-th point of the Halton sequence in [0,1) for a prime base.
double halton(std::uint64_t k, unsigned base);

/// Low-discrepancy point in the solid ball of radius `radius`, indexed by k.
/// Deterministic; successive k give well-spread points (n = 1, 2 use exact
/// area-preserving maps, higher n falls back to a seeded direction).
Vec low_discrepancy_ball(int n, std::uint64_t k, double radius);

/// Low-discrepancy direction on the unit sphere.
Vec low_discrepancy_direction(int n, std::uint64_t k);

}  // namespace relosc
