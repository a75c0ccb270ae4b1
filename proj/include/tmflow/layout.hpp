#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmflow/encoding.hpp"
#include "tmflow/tm.hpp"

namespace tmflow {

struct Point2 {
  Rational x, y;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Closed axis-aligned rectangle [x0,x1] x [y0,y1] with exact corners.
struct Rect {
  Rational x0, y0, x1, y1;

  static Rect square(const Point2& center, const Rational& half);
  Rect inflated(const Rational& d) const;
  Rect translated(const Point2& v) const;
  Rect hull(const Rect& other) const;
  bool contains(const Point2& p) const;
  bool contains(const Rect& r) const;
  bool strictly_contains(const Rect& r) const;
  bool intersects(const Rect& r) const;
};

/// Chebyshev separation between two rectangles; negative when they overlap.
Rational separation(const Rect& a, const Rect& b);

enum class SquareKind { State, Parking, Staging, SubCell };

struct Square {
  std::string name;
  SquareKind kind = SquareKind::State;
  Point2 center;
  Rational half;
  /// For sub-cells: index of the enclosing state square.
  std::optional<std::size_t> parent;

  Rect rect() const { return Rect::square(center, half); }
};

enum class TapeGate { None, CylinderX, CylinderY };
enum class LegKind { Ingest, Stage, Deposit };

/// A straight translation of a square-shaped region along a route.
struct Leg {
  std::string label;
  LegKind kind = LegKind::Ingest;
  std::size_t pipeline = 0;
  Rect moving;  // region carried, at the start of the leg
  Point2 displacement;
  TapeGate gate = TapeGate::None;
  int gate_symbol = 0;
};

/// One (state, symbol) row of the transition table.
struct Branch {
  std::size_t state = 0;
  int read = 0;
  Transition transition;
  std::size_t parking = 0;  // square index
  std::array<std::size_t, 3> ingest{};
  std::vector<std::size_t> pipelines;
};

/// The path of one configuration class from its parking square to a private
/// sub-cell of the target state square. Left shifts fork one pipeline per
/// possible popped digit.
struct Pipeline {
  std::size_t branch = 0;
  std::optional<int> popped;
  std::optional<std::size_t> staging;  // square index
  std::array<std::size_t, 3> stage{};  // legs, valid when staging is set
  std::size_t final_square = 0;
  std::size_t target_state = 0;
  std::size_t subcell = 0;  // square index
  std::array<std::size_t, 3> deposit{};
};

class RecipeOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LayoutOptions {
  /// Override of the square half-side; only useful to build broken fixtures.
  std::optional<Rational> half_side;
};

struct Layout {
  int alphabet_size = 2;
  std::size_t halt_state = 0;
  Rational half_side;    // r, half-side of state/parking/staging squares
  Rational contraction;  // rho = 1/(2 N_in)
  Rational core_margin;  // state-torus plateau core inflation
  Rational band;         // state-torus plateau transition width
  Rational tape_core_margin;
  Rational tape_band;
  std::array<Rational, 3> rows;   // heights of B, P and P2 rows
  std::array<Rational, 3> lanes;  // heights of travel lanes

  std::vector<Square> squares;
  std::vector<std::size_t> state_square;  // per state index
  std::vector<Branch> branches;
  std::vector<Pipeline> pipelines;
  std::vector<Leg> legs;

  Rect tube_core(const Leg& leg) const;
  Rect tube_support(const Leg& leg) const;
  Rect station_core(std::size_t square) const;
  Rect station_support(std::size_t square) const;
  Rect halt_core() const;
  Rect halt_support() const;

  /// Squares a leg may touch: its endpoints (with their sub-cells for the
  /// origin state square, and only the pipeline's own sub-cell at the target).
  bool leg_owns(const Leg& leg, std::size_t square) const;
};

/// Default recipe. Requires at most 16 states and alphabet size at most 4.
Layout build_layout(const TMSpec& spec, const LayoutOptions& options = {});

/// Empty iff every layout invariant holds; each entry names the offending
/// squares or legs.
std::vector<std::string> validate_layout(const Layout& layout);

/// Configuration point on T^2 x T^2.
struct Config4 {
  Point2 state;
  TapePoint tape;

  friend bool operator==(const Config4&, const Config4&) = default;
};

Config4 encode_config(const TMSpec& spec, const Configuration& c, const Layout& layout);

/// State whose closed square contains p, if any.
std::optional<std::size_t> classify_state(const Layout& layout, const Point2& p);

}  // namespace tmflow
