#include "tmflow/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tmflow::checks {

namespace {

constexpr std::size_t kMaxMessages = 8;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::string describe(const TMSpec& spec, const Configuration& c) {
  return "(" + spec.states[c.state] + ", " + format_tape_literal(c.tape) + ")";
}

double relative(const Vec11& got, const Vec11& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 11; ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

void SuiteResult::fail(std::string message) {
  ++failure_count;
  if (failures.size() < kMaxMessages) failures.push_back(std::move(message));
}

void SuiteResult::record_max(const std::string& key, double value) {
  auto [it, inserted] = metrics.emplace(key, value);
  if (!inserted) it->second = std::max(it->second, value);
}

std::string SuiteResult::summary() const {
  std::ostringstream out;
  out << (passed() ? "PASS " : "FAIL ") << name << " (" << cases << " cases";
  if (!passed()) out << ", " << failure_count << " failures";
  for (const auto& [k, v] : metrics) out << ", " << k << "=" << v;
  out << ")";
  for (const auto& f : failures) out << "\n    " << f;
  return out.str();
}

Tape random_tape(Rng& rng, int alphabet_size, std::size_t max_len) {
  auto len = [&] { return pick(rng, max_len + 1); };
  auto sym = [&] { return static_cast<int>(pick(rng, static_cast<std::size_t>(alphabet_size))); };
  Tape t;
  t.left.resize(len());
  t.right.resize(len());
  for (auto& s : t.left) s = sym();
  for (auto& s : t.right) s = sym();
  t.head = sym();
  t.canonicalize();
  return t;
}

std::vector<Configuration> sample_reachable(const TMSpec& spec, std::size_t count, Rng& rng,
                                            std::size_t max_depth) {
  std::vector<Configuration> out;
  out.reserve(count);
  while (out.size() < count) {
    Configuration c = start_config(spec, random_tape(rng, spec.alphabet_size));
    const std::size_t depth = pick(rng, max_depth + 1);
    for (std::size_t k = 0; k < depth; ++k) {
      auto next = step(spec, c);
      if (!next || spec.is_halt(next->state)) break;
      c = std::move(*next);
    }
    out.push_back(std::move(c));
  }
  return out;
}

double circle_distance(double a, double b) {
  const double d = wrap_unit(a - b);
  return std::min(d, 1.0 - d);
}

Vec4 integrate_period(const SuspensionField& field, const Vec4& p, const IntegratorConfig& cfg) {
  auto rhs = [&](double s, const Vec4& y) { return field.eval(y, s); };
  auto never = [](double, const Vec4&) { return -1.0; };
  auto quiet = [](double, const Vec4&) {};
  return integrate<4>(rhs, 0.0, p, 1.0, cfg, never, quiet).y;
}

SuiteResult layout_suite(const System& sys) {
  SuiteResult r;
  r.name = "layout";
  for (auto& v : validate_layout(sys.layout)) r.fail(std::move(v));
  for (auto& v : validate_schedule(sys.field->schedule(), sys.layout)) r.fail(std::move(v));
  r.cases = sys.layout.squares.size() + sys.layout.legs.size() + sys.field->schedule().windows.size();
  return r;
}

namespace {

void compare_period(SuiteResult& r, const System& sys, const Config4& p, const Configuration& c,
                    const std::string& what) {
  const auto next = step(sys.spec, c);
  if (!next) return;
  ++r.cases;
  Config4 got;
  try {
    got = flow_period_exact(sys.field->schedule(), p);
  } catch (const AmbiguousMembership& e) {
    r.fail(what + ": " + e.what());
    return;
  }
  if (!(got.tape == encode_tape(next->tape, sys.spec.alphabet_size)))
    r.fail(what + ": tape point differs from the encoded successor tape " +
           format_tape_literal(next->tape));
  const Rect target = sys.layout.squares[sys.layout.state_square[next->state]].rect();
  if (!target.contains(got.state))
    r.fail(what + ": state point outside the square of " + sys.spec.states[next->state]);
}

}  // namespace

SuiteResult conjugacy_suite(const System& sys, const std::vector<Configuration>& configs,
                            std::size_t iterate_steps) {
  SuiteResult r;
  r.name = "conjugacy";
  for (const auto& c : configs) {
    compare_period(r, sys, encode_config(sys.spec, c, sys.layout), c, describe(sys.spec, c));
  }
  // Iterated periods: the state point sits in a sub-cell after the first one.
  for (std::size_t i = 0; i < configs.size(); i += std::max<std::size_t>(1, configs.size() / 10)) {
    Configuration c = start_config(sys.spec, configs[i].tape);
    Config4 p = encode_config(sys.spec, c, sys.layout);
    for (std::size_t k = 0; k < iterate_steps && !sys.spec.is_halt(c.state); ++k) {
      const std::size_t before = r.failure_count;
      compare_period(r, sys, p, c,
                     "period " + std::to_string(k + 1) + " from " + describe(sys.spec, c));
      if (r.failure_count != before) break;
      p = flow_period_exact(sys.field->schedule(), p);
      c = *step(sys.spec, c);
    }
  }
  return r;
}

SuiteResult flow_agreement_suite(const System& sys, const std::vector<Configuration>& configs,
                                 double tolerance, const IntegratorConfig& cfg) {
  SuiteResult r;
  r.name = "flow-agreement";
  for (const auto& c : configs) {
    ++r.cases;
    const Config4 p = encode_config(sys.spec, c, sys.layout);
    Config4 exact;
    try {
      exact = flow_period_exact(sys.field->schedule(), p);
    } catch (const AmbiguousMembership& e) {
      r.fail(describe(sys.spec, c) + ": " + e.what());
      continue;
    }
    const Vec4 start{to_double(p.state.x), to_double(p.state.y), to_double(p.tape.x),
                     to_double(p.tape.y)};
    const Vec4 want{to_double(exact.state.x), to_double(exact.state.y), to_double(exact.tape.x),
                    to_double(exact.tape.y)};
    const Vec4 got = integrate_period(*sys.field, start, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, circle_distance(got[i], want[i]));
    r.record_max("max_error", worst);
    if (!(worst <= tolerance)) {
      std::ostringstream msg;
      msg << describe(sys.spec, c) << ": numeric period map off by " << worst;
      r.fail(msg.str());
    }
  }
  return r;
}

SuiteResult support_suite(const System& sys, std::size_t samples_per_square, Rng& rng) {
  SuiteResult r;
  r.name = "support";
  const Schedule& sched = sys.field->schedule();
  const auto& squares = sys.layout.squares;
  for (std::size_t w = 0; w < sched.windows.size(); ++w) {
    const Window& win = sched.windows[w];
    for (std::size_t q = 0; q < squares.size(); ++q) {
      if (std::find(win.own_squares.begin(), win.own_squares.end(), q) != win.own_squares.end())
        continue;
      const Rect box = squares[q].rect();
      const double x0 = to_double(box.x0), x1 = to_double(box.x1);
      const double y0 = to_double(box.y0), y1 = to_double(box.y1);
      for (std::size_t k = 0; k < samples_per_square; ++k) {
        ++r.cases;
        // The first four samples are the corners.
        const double x = k < 4 ? (k & 1 ? x1 : x0) : uniform(rng, x0, x1);
        const double y = k < 4 ? (k & 2 ? y1 : y0) : uniform(rng, y0, y1);
        const Vec4 p{x, y, uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
        const double s = uniform(rng, win.start, win.end);
        const Vec4 v = sys.field->eval(p, s);
        if (v != Vec4{}) {
          std::ostringstream msg;
          msg << "window " << win.label << " moves foreign square " << squares[q].name
              << " at (" << x << ", " << y << "), s = " << s;
          r.fail(msg.str());
        }
      }
    }
  }
  return r;
}

ManifoldPoint random_manifold_point(const HeightParams& hp, Rng& rng) {
  ManifoldPoint p;
  for (auto& a : p.angles) a = uniform(rng, 0.0, 1.0);
  if (pick(rng, 2) == 0) {
    const double pad = hp.state_band * 1.2;
    p.angles[0] = uniform(rng, hp.core_x0 - pad, hp.core_x1 + pad);
    p.angles[1] = uniform(rng, hp.core_y0 - pad, hp.core_y1 + pad);
    const double reach = hp.clock_core + 1.2 * hp.clock_band;
    p.angles[4] = wrap_unit(uniform(rng, -reach, reach));
  }
  return p;
}

SuiteResult geometry_suite(const System& sys, std::size_t samples, std::size_t derivative_samples,
                           Rng& rng, const GeometryTolerances& tol) {
  SuiteResult r;
  r.name = "geometry";
  const HeightParams& hp = sys.height;
  auto check = [&](const char* key, double value, double bound, const ManifoldPoint& p) {
    r.record_max(key, value);
    if (!(value <= bound)) {
      std::ostringstream msg;
      msg << key << " = " << value << " exceeds " << bound << " at (" << p.angles[0] << ", "
          << p.angles[1] << ", " << p.angles[2] << ", " << p.angles[3] << ", " << p.angles[4]
          << ")";
      r.fail(msg.str());
    }
  };

  for (std::size_t i = 0; i < samples; ++i) {
    ++r.cases;
    const ManifoldPoint p = random_manifold_point(hp, rng);
    const Vec10 e = embed(p);
    double e2 = 0.0;
    for (double v : e) e2 += v * v;
    check("embed_norm_error", std::abs(e2 - 5.0), tol.embed_norm, p);

    const double h = height_value(p, hp);
    const Vec11 w = ball_map(p, hp);
    const double w2 = norm(w) * norm(w);
    check("ball_identity_error", std::abs(w2 - (5.0 + h * h) / 6.0), tol.ball_identity, p);
    // |w| <= 1, reaching 1 only on the plateau.
    if (w2 > 1.0 + 4e-16 || (h < 1.0 - 1e-6 && !(w2 < 1.0)) || (h == 1.0 && w2 < 1.0 - 4e-16))
      r.fail("ball condition violated at h = " + std::to_string(h));

    // T o T^-1 on an ambient point of comparable size.
    Vec11 x;
    for (auto& c : x) c = uniform(rng, -3.0, 3.0);
    const Vec11 back = poincare(poincare_inv(x));
    double dev = 0.0;
    for (std::size_t k = 0; k < 11; ++k) dev = std::max(dev, std::abs(back[k] - x[k]));
    check("poincare_roundtrip_error", dev, tol.poincare_roundtrip, p);

    if (h < 1.0) {
      const Retraction ret = retract(forward_map(p, hp), hp);
      double ad = 0.0;
      for (std::size_t k = 0; k < 5; ++k)
        ad = std::max(ad, circle_distance(ret.point.angles[k], p.angles[k]));
      check("retraction_angle_error", ad, tol.retraction, p);
      check("retraction_distance", ret.distance(), tol.retraction, p);
    }
  }

  for (std::size_t i = 0; i < derivative_samples; ++i) {
    const ManifoldPoint p = random_manifold_point(hp, rng);
    if (!(height_value(p, hp) < 0.999)) continue;
    ++r.cases;
    Vec5 v;
    for (auto& c : v) c = uniform(rng, -1.0, 1.0);
    const Vec11 jvp = forward_tangent(p, hp, v);
    const double eps = 1e-7;
    ManifoldPoint plus = p, minus = p;
    for (std::size_t k = 0; k < 5; ++k) {
      plus.angles[k] += eps * v[k];
      minus.angles[k] -= eps * v[k];
    }
    const Vec11 gp = forward_map(plus, hp), gm = forward_map(minus, hp);
    Vec11 fd;
    for (std::size_t k = 0; k < 11; ++k) fd[k] = (gp[k] - gm[k]) / (2 * eps);
    check("jvp_relative_error", relative(jvp, fd), tol.jvp_relative, p);

    // On the image, F is the pushforward of (V, 1).
    const Vec4 vv = sys.field->eval(p.torus(), p.clock());
    const Vec11 push = forward_tangent(p, hp, {vv[0], vv[1], vv[2], vv[3], 1.0});
    const Vec11 f = sys.ambient.eval(forward_map(p, hp));
    check("pushforward_relative_error", relative(f, push), tol.pushforward_relative, p);
  }
  return r;
}

SuiteResult trajectory_pushforward_suite(const System& sys, const Configuration& c0,
                                         std::size_t samples, double tolerance) {
  SuiteResult r;
  r.name = "trajectory-pushforward";
  const SuspensionField& field = *sys.field;
  const HeightParams& hp = sys.height;
  using State = std::array<double, 5>;
  auto rhs = [&](double, const State& y) {
    const Vec4 v = field.eval({y[0], y[1], y[2], y[3]}, y[4]);
    return State{v[0], v[1], v[2], v[3], 1.0};
  };
  std::vector<std::pair<double, State>> path;
  auto event = [&](double, const State& y) {
    return height_value(ManifoldPoint{y}, hp) - (1.0 - kHeightEventTol);
  };
  auto observe = [&](double t, const State& y) { path.emplace_back(t, y); };
  RunOptions opt;
  integrate<5>(rhs, 0.0, initial_point(sys, c0).angles, opt.horizon, opt.integrator, event,
               observe);

  // Keep points where G is finite and not yet dominated by rounding.
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < path.size(); ++i)
    if (height_value(ManifoldPoint{path[i].second}, hp) < 0.999) usable.push_back(i);
  if (usable.empty()) {
    r.fail("no usable trajectory points");
    return r;
  }
  const double dt = 1e-7;
  auto rk4 = [&](double t, const State& y, double h) {
    std::size_t evals = 0;
    return detail::rk4_step<5>(rhs, t, y, h, evals);
  };
  const std::size_t n = std::min(samples, usable.size());
  for (std::size_t j = 0; j < n; ++j) {
    const auto& [t, y] = path[usable[j * usable.size() / n]];
    ++r.cases;
    const Vec11 gp = forward_map(ManifoldPoint{rk4(t, y, dt)}, hp);
    const Vec11 gm = forward_map(ManifoldPoint{rk4(t, y, -dt)}, hp);
    Vec11 fd;
    for (std::size_t k = 0; k < 11; ++k) fd[k] = (gp[k] - gm[k]) / (2 * dt);
    const Vec11 f = sys.ambient.eval(forward_map(ManifoldPoint{y}, hp));
    const double err = relative(f, fd);
    r.record_max("relative_error", err);
    if (!(err <= tolerance)) {
      std::ostringstream msg;
      msg << "tau = " << t << ": relative error " << err;
      r.fail(msg.str());
    }
  }
  return r;
}

}  // namespace tmflow::checks
