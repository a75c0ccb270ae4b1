#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace tmflow {

enum class Method { DormandPrince45, ClassicalRK4 };

struct IntegratorConfig {
  Method method = Method::DormandPrince45;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = 1e-3;
  /// Step of the fixed-step method.
  double fixed_step = 1e-4;
  /// Bracket width at which event bisection stops.
  double event_tol = 1e-9;
  double min_step = 1e-14;
  std::size_t max_steps = 100'000'000;
};

enum class StopReason { Horizon, Event, StepSizeUnderflow, NonFinite, StepLimit };

template <std::size_t N>
struct IntegrationResult {
  StopReason reason = StopReason::Horizon;
  double t = 0.0;
  std::array<double, N> y{};
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace detail {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [c, k] : terms)
    if (c != 0.0)
      for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  return out;
}

template <std::size_t N>
bool finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

// Dormand-Prince 5(4). Returns the 5th-order solution and writes the
// embedded error estimate.
template <std::size_t N, class F>
State<N> dp_step(F& f, double t, const State<N>& y, double h, State<N>* err, std::size_t& evals) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const State<N> k1 = f(t, y);
  const State<N> k2 = f(t + c2 * h, axpy<N>(y, h, {{a21, &k1}}));
  const State<N> k3 = f(t + c3 * h, axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
  const State<N> k4 = f(t + c4 * h, axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State<N> k5 =
      f(t + c5 * h, axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State<N> k6 =
      f(t + h, axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const State<N> y5 = axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  evals += 6;
  if (err) {
    const State<N> k7 = f(t + h, y5);
    ++evals;
    for (std::size_t i = 0; i < N; ++i)
      (*err)[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  }
  return y5;
}

template <std::size_t N, class F>
State<N> rk4_step(F& f, double t, const State<N>& y, double h, std::size_t& evals) {
  const State<N> k1 = f(t, y);
  const State<N> k2 = f(t + h / 2, axpy<N>(y, h, {{0.5, &k1}}));
  const State<N> k3 = f(t + h / 2, axpy<N>(y, h, {{0.5, &k2}}));
  const State<N> k4 = f(t + h, axpy<N>(y, h, {{1.0, &k3}}));
  evals += 4;
  return axpy<N>(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
}

}  // namespace detail

/// Integrate dy/dt = f(t, y) from t0 to t_end.
///
/// `event(t, y)` is checked after every accepted step; the first crossing
/// from negative to non-negative is refined by bisection on the step
/// fraction, re-stepping from the last accepted state, and integration stops
/// there. `observe(t, y)` sees the initial state and every accepted state.
template <std::size_t N, class F, class Event, class Observe>
IntegrationResult<N> integrate(F&& f, double t0, const std::array<double, N>& y0, double t_end,
                               const IntegratorConfig& cfg, Event&& event, Observe&& observe) {
  using detail::State;
  IntegrationResult<N> res;
  res.t = t0;
  res.y = y0;
  observe(res.t, res.y);
  if (event(res.t, res.y) >= 0.0) {
    res.reason = StopReason::Event;
    return res;
  }

  const bool adaptive = cfg.method == Method::DormandPrince45;
  auto single = [&](double t, const State<N>& y, double h) {
    return adaptive ? detail::dp_step<N>(f, t, y, h, nullptr, res.evaluations)
                    : detail::rk4_step<N>(f, t, y, h, res.evaluations);
  };

  double h = adaptive ? std::min(cfg.max_step, 1e-4) : cfg.fixed_step;
  while (res.t < t_end) {
    if (res.accepted + res.rejected >= cfg.max_steps) {
      res.reason = StopReason::StepLimit;
      return res;
    }
    h = std::min(h, t_end - res.t);
    State<N> next;
    if (adaptive) {
      State<N> err;
      next = detail::dp_step<N>(f, res.t, res.y, h, &err, res.evaluations);
      double acc = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double scale =
            cfg.abs_tol + cfg.rel_tol * std::max(std::abs(res.y[i]), std::abs(next[i]));
        const double r = err[i] / scale;
        acc += r * r;
      }
      const double e = std::sqrt(acc / N);
      if (!detail::finite<N>(next)) {
        ++res.rejected;
        h *= 0.2;
        if (h < cfg.min_step * std::max(1.0, std::abs(res.t))) {
          res.reason = StopReason::NonFinite;
          return res;
        }
        continue;
      }
      // An error ratio that overflows (tiny tolerances) is an ordinary rejection.
      const double factor =
          e == 0.0 ? 5.0 : std::isnan(e) ? 0.2 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      if (!(e <= 1.0)) {
        ++res.rejected;
        h *= factor;
        if (h < cfg.min_step * std::max(1.0, std::abs(res.t))) {
          res.reason = StopReason::StepSizeUnderflow;
          return res;
        }
        continue;
      }
      const double taken = h;
      h = std::min(cfg.max_step, h * factor);
      if (event(res.t + taken, next) >= 0.0) {
        double lo = 0.0, hi = 1.0;
        State<N> y_hi = next;
        while ((hi - lo) * taken > cfg.event_tol) {
          const double mid = 0.5 * (lo + hi);
          State<N> y_mid = single(res.t, res.y, mid * taken);
          if (event(res.t + mid * taken, y_mid) >= 0.0) {
            hi = mid;
            y_hi = y_mid;
          } else {
            lo = mid;
          }
        }
        ++res.accepted;
        res.t += hi * taken;
        res.y = y_hi;
        observe(res.t, res.y);
        res.reason = StopReason::Event;
        return res;
      }
      ++res.accepted;
      res.t += taken;
      res.y = next;
    } else {
      const double taken = h;
      next = single(res.t, res.y, taken);
      if (!detail::finite<N>(next)) {
        res.reason = StopReason::NonFinite;
        return res;
      }
      if (event(res.t + taken, next) >= 0.0) {
        double lo = 0.0, hi = 1.0;
        State<N> y_hi = next;
        while ((hi - lo) * taken > cfg.event_tol) {
          const double mid = 0.5 * (lo + hi);
          State<N> y_mid = single(res.t, res.y, mid * taken);
          if (event(res.t + mid * taken, y_mid) >= 0.0) {
            hi = mid;
            y_hi = y_mid;
          } else {
            lo = mid;
          }
        }
        ++res.accepted;
        res.t += hi * taken;
        res.y = y_hi;
        observe(res.t, res.y);
        res.reason = StopReason::Event;
        return res;
      }
      ++res.accepted;
      res.t += taken;
      res.y = next;
      h = cfg.fixed_step;
    }
    observe(res.t, res.y);
  }
  res.reason = StopReason::Horizon;
  return res;
}

}  // namespace tmflow
