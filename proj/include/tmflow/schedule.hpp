#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmflow/layout.hpp"

namespace tmflow {

/// Coordinates of a point of T^4, in this order.
enum Coord : std::size_t { StateX = 0, StateY = 1, TapeX = 2, TapeY = 3 };

struct Interval {
  Rational lo, hi;
};

/// Product of one-dimensional plateaus over the constrained coordinates:
/// exactly 1 on the core box, exactly 0 once any coordinate is `band` or more
/// outside its core interval. Unconstrained coordinates contribute 1.
struct Gate {
  std::array<std::optional<Interval>, 4> core;
  std::array<Rational, 4> band;

  enum class Membership { Core, Outside, Ring };
  Membership classify(const Config4& p) const;
};

enum class MoveKind { Translate, Saddle, Contract };

/// Saddle variants: PopX expands tape x (head moves right), PopY expands
/// tape y (head moves left).
enum class SaddleAxis { PopX, PopY };

/// Gated linear vector field whose time-1 flow (for unit total clock
/// weight) is an exact affine map.
struct Move {
  MoveKind kind = MoveKind::Translate;
  Gate gate;
  // Translate
  std::array<Rational, 4> displacement;
  // Saddle
  SaddleAxis axis = SaddleAxis::PopX;
  Rational fixed_point;
  long radix = 4;
  // Contract
  Point2 center;
  Rational ratio;

  /// Exact time-1 map of the ungated linear field.
  Config4 apply(const Config4& p) const;
};

enum class Phase { A, B };

struct Window {
  std::string label;
  Phase phase = Phase::A;
  double start = 0.0;
  double end = 0.0;
  Move move;
  /// Squares the move is allowed to touch (by index into Layout::squares).
  std::vector<std::size_t> own_squares;
};

struct Schedule {
  std::vector<Window> windows;
  /// Relative ramp width of every clock profile.
  double ramp = 0.25;
  std::size_t phase_a_size = 0;

  /// Clock weight omega(s) of window `w`; integrates to 1 over the window.
  double profile(std::size_t w, double s) const;
  /// Index of the window whose closed interval contains s (s in [0,1)).
  std::optional<std::size_t> active(double s) const;
};

/// Earliest and latest clock values any move may use.
inline constexpr double kScheduleBegin = 0.1;
inline constexpr double kScheduleEnd = 0.9;

Schedule build_schedule(const TMSpec& spec, const Layout& layout);

/// Structural invariants: disjoint windows inside [0.1,0.9], all phase-A
/// windows first, one complete pipeline per branch.
std::vector<std::string> validate_schedule(const Schedule& schedule, const Layout& layout);

class AmbiguousMembership : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact period map on configuration points: composes, in window order, the
/// affine time-1 map of every window whose gate core holds the running point.
Config4 flow_period_exact(const Schedule& schedule, const Config4& p);

}  // namespace tmflow
