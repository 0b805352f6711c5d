#pragma once

namespace relosc {

// C1 radial tails used by the built-in perturbations. Both vanish (with
// derivative) up to the threshold; `bounded_tail` has slope -> 1 at infinity,
// `cubic_tail` grows without bound.

inline double bounded_tail(double r, double theta) {
  const double s = r - theta;
  if (s <= 0.0) return 0.0;
  return s * s * s / (1.0 + s * s);
}

inline double bounded_tail_deriv(double r, double theta) {
  const double s = r - theta;
  if (s <= 0.0) return 0.0;
  const double d = 1.0 + s * s;
  return (s * s * s * s + 3.0 * s * s) / (d * d);
}

inline double cubic_tail(double r, double theta) {
  const double s = r - theta;
  if (s <= 0.0) return 0.0;
  return s * s * s;
}

inline double cubic_tail_deriv(double r, double theta) {
  const double s = r - theta;
  if (s <= 0.0) return 0.0;
  return 3.0 * s * s;
}

}  // namespace relosc
