#pragma once

#include <cmath>

namespace tmflow::smooth {

// Smooth step built from f(t) = exp(-1/t) for t > 0, 0 otherwise:
//   S(t) = f(t) / (f(t) + f(1 - t)).
// S is exactly 0 for t <= 0, exactly 1 for t >= 1, and S(t) + S(1-t) = 1.
// Inside (0,1) it is evaluated as a logistic of 1/t - 1/(1-t).

inline double step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double g = 1.0 / t - 1.0 / (1.0 - t);
  return 1.0 / (1.0 + std::exp(g));
}

inline double step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = step(t);
  const double c = step(1.0 - t);
  return s * c * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
}

/// Value v together with 1 - v, each computed without cancellation.
struct Complemented {
  double value;
  double complement;
};

/// One-dimensional plateau: 1 on [lo, hi], 0 outside (lo - band, hi + band).
inline Complemented plateau(double x, double lo, double hi, double band) {
  const double a = (x - (lo - band)) / band;
  const double b = ((hi + band) - x) / band;
  const double sa = step(a), sb = step(b);
  // 1 - sa*sb = (1 - sa) + sa (1 - sb)
  return {sa * sb, step(1.0 - a) + sa * step(1.0 - b)};
}

inline double plateau_value(double x, double lo, double hi, double band) {
  return step((x - (lo - band)) / band) * step(((hi + band) - x) / band);
}

inline double plateau_derivative(double x, double lo, double hi, double band) {
  const double a = (x - (lo - band)) / band;
  const double b = ((hi + band) - x) / band;
  return (step_derivative(a) * step(b) - step(a) * step_derivative(b)) / band;
}

/// Product of two complemented factors: 1 - uv = (1 - u) + u (1 - v).
inline Complemented product(Complemented u, Complemented v) {
  return {u.value * v.value, u.complement + u.value * v.complement};
}

/// Bump supported on [0,1] with ramps of relative width `ramp` (<= 1/2) at
/// each end; its integral is exactly 1 - ramp because S(t) + S(1-t) = 1.
inline double window_bump(double u, double ramp) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return step(u / ramp) * step((1.0 - u) / ramp);
}

inline double window_bump_integral(double ramp) { return 1.0 - ramp; }

}  // namespace tmflow::smooth
