#include "tmflow/geometry.hpp"

#include <cmath>
#include <numbers>

namespace tmflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrt6 = std::sqrt(kBallRadius2);
constexpr double kPairFloor = 0.5;

double dot(const Vec11& a, const Vec11& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 11; ++i) s += a[i] * b[i];
  return s;
}

// Signed clock offset in [-1/2, 1/2).
double centered(double s) {
  double r = wrap_unit(s);
  return r >= 0.5 ? r - 1.0 : r;
}

struct HeightFactors {
  smooth::Complemented state_x, state_y, clock;
};

HeightFactors factors(const ManifoldPoint& p, const HeightParams& hp) {
  const double c = centered(p.clock());
  return {smooth::plateau(wrap_unit(p.angles[0]), hp.core_x0, hp.core_x1, hp.state_band),
          smooth::plateau(wrap_unit(p.angles[1]), hp.core_y0, hp.core_y1, hp.state_band),
          smooth::plateau(c, -hp.clock_core, hp.clock_core, hp.clock_band)};
}

std::optional<Retraction> try_retract_scaled(const Vec11& u, const HeightParams& hp) {
  Retraction r;
  double d2 = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const double a = u[2 * i], b = u[2 * i + 1];
    const double n = std::hypot(a, b);
    if (n < kPairFloor) return std::nullopt;
    r.point.angles[i] = wrap_unit(std::atan2(b, a) / kTwoPi);
    d2 += (n - 1.0) * (n - 1.0);
  }
  const double dz = u[10] - height_value(r.point, hp);
  r.distance_sq = d2 + dz * dz;
  return r;
}

Vec11 scaled(const Vec11& v, double k) {
  Vec11 out;
  for (std::size_t i = 0; i < 11; ++i) out[i] = v[i] * k;
  return out;
}

}  // namespace

ManifoldPoint ManifoldPoint::reduced() const {
  ManifoldPoint out;
  for (std::size_t i = 0; i < 5; ++i) out.angles[i] = wrap_unit(angles[i]);
  return out;
}

HeightParams HeightParams::from_layout(const Layout& layout) {
  const Rect core = layout.halt_core();
  const Rect support = layout.halt_support();
  HeightParams hp;
  hp.core_x0 = to_double(core.x0);
  hp.core_x1 = to_double(core.x1);
  hp.core_y0 = to_double(core.y0);
  hp.core_y1 = to_double(core.y1);
  hp.state_band = to_double(support.x1 - core.x1);
  return hp;
}

smooth::Complemented height(const ManifoldPoint& p, const HeightParams& hp) {
  const auto f = factors(p, hp);
  return smooth::product(smooth::product(f.state_x, f.state_y), f.clock);
}

double height_value(const ManifoldPoint& p, const HeightParams& hp) { return height(p, hp).value; }

Vec5 height_gradient(const ManifoldPoint& p, const HeightParams& hp) {
  const auto f = factors(p, hp);
  const double x = wrap_unit(p.angles[0]), y = wrap_unit(p.angles[1]);
  const double c = centered(p.clock());
  Vec5 g{};
  g[0] = smooth::plateau_derivative(x, hp.core_x0, hp.core_x1, hp.state_band) *
         f.state_y.value * f.clock.value;
  g[1] = f.state_x.value *
         smooth::plateau_derivative(y, hp.core_y0, hp.core_y1, hp.state_band) * f.clock.value;
  g[4] = f.state_x.value * f.state_y.value *
         smooth::plateau_derivative(c, -hp.clock_core, hp.clock_core, hp.clock_band);
  return g;
}

Vec10 embed(const ManifoldPoint& p) {
  Vec10 out;
  for (std::size_t i = 0; i < 5; ++i) {
    const double a = kTwoPi * wrap_unit(p.angles[i]);
    out[2 * i] = std::cos(a);
    out[2 * i + 1] = std::sin(a);
  }
  return out;
}

Vec11 ball_scale(const Vec11& w) { return scaled(w, 1.0 / kSqrt6); }
Vec11 ball_unscale(const Vec11& w) { return scaled(w, kSqrt6); }

double norm(const Vec11& v) { return std::sqrt(dot(v, v)); }

Vec11 poincare(const Vec11& w) {
  const double r2 = dot(w, w);
  if (r2 >= 1.0) throw DomainError("Poincare map needs |w| < 1");
  return scaled(w, 1.0 / std::sqrt(1.0 - r2));
}

Vec11 poincare_inv(const Vec11& x) { return scaled(x, 1.0 / std::sqrt(1.0 + dot(x, x))); }

Vec11 poincare_jvp(const Vec11& w, const Vec11& u) {
  const double r2 = dot(w, w);
  if (r2 >= 1.0) throw DomainError("Poincare map needs |w| < 1");
  const double a = 1.0 / std::sqrt(1.0 - r2);
  const double k = a * a * a * dot(w, u);
  Vec11 out;
  for (std::size_t i = 0; i < 11; ++i) out[i] = a * u[i] + k * w[i];
  return out;
}

Vec11 poincare_inv_jvp(const Vec11& x, const Vec11& v) {
  const double b = 1.0 / std::sqrt(1.0 + dot(x, x));
  const double k = b * b * b * dot(x, v);
  Vec11 out;
  for (std::size_t i = 0; i < 11; ++i) out[i] = b * v[i] - k * x[i];
  return out;
}

Vec11 embed_with_height(const ManifoldPoint& p, const HeightParams& hp) {
  const Vec10 e = embed(p);
  Vec11 out;
  std::copy(e.begin(), e.end(), out.begin());
  out[10] = height_value(p, hp);
  return out;
}

namespace {

// dE_h(p)[v]
Vec11 embed_tangent(const ManifoldPoint& p, const HeightParams& hp, const Vec5& v) {
  Vec11 out;
  for (std::size_t i = 0; i < 5; ++i) {
    const double a = kTwoPi * wrap_unit(p.angles[i]);
    out[2 * i] = -kTwoPi * std::sin(a) * v[i];
    out[2 * i + 1] = kTwoPi * std::cos(a) * v[i];
  }
  const Vec5 g = height_gradient(p, hp);
  double dh = 0.0;
  for (std::size_t i = 0; i < 5; ++i) dh += g[i] * v[i];
  out[10] = dh;
  return out;
}

}  // namespace

Vec11 forward_map(const ManifoldPoint& p, const HeightParams& hp) {
  const auto h = height(p, hp);
  const double gap = h.complement * (1.0 + h.value);  // 1 - h^2
  if (gap <= 0.0) throw AtInfinity("height reached 1: image is at infinity");
  return scaled(embed_with_height(p, hp), 1.0 / std::sqrt(gap));
}

Vec11 forward_tangent(const ManifoldPoint& p, const HeightParams& hp, const Vec5& v) {
  const auto h = height(p, hp);
  const double gap = h.complement * (1.0 + h.value);
  if (gap <= 0.0) throw AtInfinity("height reached 1: image is at infinity");
  const Vec11 e = embed_with_height(p, hp);
  const Vec11 de = embed_tangent(p, hp, v);
  const double a = 1.0 / std::sqrt(gap);
  const double k = h.value * de[10] * a * a * a;
  Vec11 out;
  for (std::size_t i = 0; i < 11; ++i) out[i] = a * de[i] + k * e[i];
  return out;
}

Vec11 ball_map(const ManifoldPoint& p, const HeightParams& hp) {
  return ball_scale(embed_with_height(p, hp));
}

Vec11 ball_tangent(const ManifoldPoint& p, const HeightParams& hp, const Vec5& v) {
  return ball_scale(embed_tangent(p, hp, v));
}

double Retraction::distance() const { return std::sqrt(distance_sq); }

Retraction retract(const Vec11& x, const HeightParams& hp) {
  auto r = try_retract_scaled(ball_unscale(poincare_inv(x)), hp);
  if (!r) throw OutsideTube("point is outside the tubular zone of the manifold");
  return *r;
}

Retraction retract_ball(const Vec11& w, const HeightParams& hp) {
  auto r = try_retract_scaled(ball_unscale(w), hp);
  if (!r) throw OutsideTube("point is outside the tubular zone of the manifold");
  return *r;
}

AmbientField::AmbientField(std::shared_ptr<const SuspensionField> field, HeightParams hp)
    : field_(std::move(field)), hp_(hp) {}

double AmbientField::cutoff(double distance_sq) {
  constexpr double lo = kInnerRadius * kInnerRadius;
  constexpr double hi = kOuterRadius * kOuterRadius;
  return smooth::step((hi - distance_sq) / (hi - lo));
}

namespace {

Vec5 clock_tangent(const SuspensionField& f, const ManifoldPoint& p) {
  const Vec4 v = f.eval(p.torus(), p.clock());
  return {v[0], v[1], v[2], v[3], 1.0};
}

}  // namespace

Vec11 AmbientField::eval(const Vec11& x) const {
  auto r = try_retract_scaled(ball_unscale(poincare_inv(x)), hp_);
  if (!r) return Vec11{};
  const double chi = cutoff(r->distance_sq);
  if (chi == 0.0) return Vec11{};
  return scaled(forward_tangent(r->point, hp_, clock_tangent(*field_, r->point)), chi);
}

Vec11 AmbientField::eval_ball(const Vec11& w) const {
  auto r = try_retract_scaled(ball_unscale(w), hp_);
  if (!r) return Vec11{};
  const double chi = cutoff(r->distance_sq);
  if (chi == 0.0) return Vec11{};
  return scaled(ball_tangent(r->point, hp_, clock_tangent(*field_, r->point)), chi);
}

}  // namespace tmflow
