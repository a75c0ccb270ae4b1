#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>

#include "tmflow/smooth.hpp"
#include "tmflow/suspension.hpp"

namespace tmflow {

using Vec5 = std::array<double, 5>;
using Vec10 = std::array<double, 10>;
using Vec11 = std::array<double, 11>;

/// Point of N = T^4 x S^1: state x, state y, tape x, tape y, clock s.
struct ManifoldPoint {
  Vec5 angles{};

  double clock() const { return angles[4]; }
  Vec4 torus() const { return {angles[0], angles[1], angles[2], angles[3]}; }
  /// Same point with every coordinate reduced to [0,1).
  ManifoldPoint reduced() const;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class AtInfinity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class OutsideTube : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Height plateau: 1 exactly on (HALT core) x (clock core), 0 off the
/// product of supports.
struct HeightParams {
  double core_x0 = 0, core_x1 = 0, core_y0 = 0, core_y1 = 0;
  double state_band = 0;
  double clock_core = 0.05;  // core is |s| <= 0.05 on the circle
  double clock_band = 0.02;  // support is |s| < 0.07

  static HeightParams from_layout(const Layout& layout);
};

/// h together with 1 - h.
smooth::Complemented height(const ManifoldPoint& p, const HeightParams& hp);
double height_value(const ManifoldPoint& p, const HeightParams& hp);
Vec5 height_gradient(const ManifoldPoint& p, const HeightParams& hp);

/// Product of five circles: theta -> (cos 2 pi theta, sin 2 pi theta).
Vec10 embed(const ManifoldPoint& p);

/// Radius of the ball that the height-augmented image fits in: |E|^2 = 5
/// and h <= 1 give |E_h|^2 <= 6.
inline constexpr double kBallRadius2 = 6.0;

Vec11 ball_scale(const Vec11& w);
Vec11 ball_unscale(const Vec11& w);

/// x -> x / sqrt(1 - |x|^2) on the open unit ball. Throws DomainError when
/// |x| >= 1.
Vec11 poincare(const Vec11& w);
Vec11 poincare_inv(const Vec11& x);
/// Directional derivatives d T(w)[u] and d T^{-1}(x)[v].
Vec11 poincare_jvp(const Vec11& w, const Vec11& u);
Vec11 poincare_inv_jvp(const Vec11& x, const Vec11& v);

/// E_h(p) = (E(p), h(p)).
Vec11 embed_with_height(const ManifoldPoint& p, const HeightParams& hp);

/// G = T o psi o E_h, evaluated as E_h / sqrt(1 - h^2) using |E|^2 = 5.
/// Throws AtInfinity when h = 1.
Vec11 forward_map(const ManifoldPoint& p, const HeightParams& hp);
/// dG(p)[v] for a tangent vector v of N.
Vec11 forward_tangent(const ManifoldPoint& p, const HeightParams& hp, const Vec5& v);

/// Same pair without T: psi o E_h and its tangent map.
Vec11 ball_map(const ManifoldPoint& p, const HeightParams& hp);
Vec11 ball_tangent(const ManifoldPoint& p, const HeightParams& hp, const Vec5& v);

struct Retraction {
  ManifoldPoint point;
  double distance_sq = 0.0;
  double distance() const;
};

/// Nearest-angle retraction of an ambient point. Throws OutsideTube if a
/// coordinate pair of sqrt(6) T^{-1}(x) has norm below 0.5.
Retraction retract(const Vec11& x, const HeightParams& hp);
/// Same, for a point already in ball coordinates.
Retraction retract_ball(const Vec11& w, const HeightParams& hp);

double norm(const Vec11& v);

/// F = chi(dist^2) dG (V, 1) at the retracted point, 0 outside the tube.
class AmbientField {
 public:
  static constexpr double kInnerRadius = 0.05;
  static constexpr double kOuterRadius = 0.1;

  AmbientField(std::shared_ptr<const SuspensionField> field, HeightParams hp);

  const SuspensionField& suspension() const { return *field_; }
  const HeightParams& height_params() const { return hp_; }

  /// Field on R^11.
  Vec11 eval(const Vec11& x) const;
  /// Pushforward by psi only, on ball coordinates.
  Vec11 eval_ball(const Vec11& w) const;
  /// Cutoff chi as a function of squared retraction distance.
  static double cutoff(double distance_sq);

 private:
  std::shared_ptr<const SuspensionField> field_;
  HeightParams hp_;
};

}  // namespace tmflow
