#include "relosc/sampling.hpp"

#include <cmath>

namespace relosc {

double Rng::uniform01() {
  // 53 mantissa bits of the raw draw; exact same value on every platform.
  return std::ldexp(static_cast<double>(gen_() >> 11), -53);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Vec Rng::normal_vec(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Vec Rng::sphere_point(int n, double radius) {
  if (n == 1) return Vec::Constant(1, uniform01() < 0.5 ? -radius : radius);
  Vec v = normal_vec(n);
  double norm = v.norm();
  while (norm < 1e-300) {
    v = normal_vec(n);
    norm = v.norm();
  }
  return radius / norm * v;
}

Vec Rng::ball_point(int n, double radius) {
  const double r = radius * std::pow(uniform01(), 1.0 / n);
  return sphere_point(n, r);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 step over base xor stream index
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double halton(std::uint64_t k, unsigned base) {
  double f = 1.0, r = 0.0;
  while (k > 0) {
    f /= base;
    r += f * static_cast<double>(k % base);
    k /= base;
  }
  return r;
}

Vec low_discrepancy_ball(int n, std::uint64_t k, double radius) {
  if (n == 1) {
    return Vec::Constant(1, radius * (2.0 * halton(k + 1, 2) - 1.0));
  }
  if (n == 2) {
    const double r = radius * std::sqrt(halton(k + 1, 2));
    const double a = 2.0 * M_PI * halton(k + 1, 3);
    Vec v(2);
    v << r * std::cos(a), r * std::sin(a);
    return v;
  }
  Rng rng(derive_seed(0x5eedba11, k));
  const double r = radius * std::pow(halton(k + 1, 2), 1.0 / n);
  return rng.sphere_point(n, r);
}

Vec low_discrepancy_direction(int n, std::uint64_t k) {
  if (n == 1) return Vec::Constant(1, k % 2 == 0 ? 1.0 : -1.0);
  if (n == 2) {
    const double a = 2.0 * M_PI * halton(k + 1, 2);
    Vec v(2);
    v << std::cos(a), std::sin(a);
    return v;
  }
  Rng rng(derive_seed(0xd17ec710ULL, k));
  return rng.sphere_point(n, 1.0);
}

}  // namespace relosc
