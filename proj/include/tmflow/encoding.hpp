#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <utility>

#include "tmflow/tm.hpp"

namespace tmflow {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// Point of the tape torus: x carries cells 0,1,2,... and y carries cells
/// -1,-2,... as gapped radix-2b expansions.
struct TapePoint {
  Rational x, y;

  friend bool operator==(const TapePoint&, const TapePoint&) = default;
};

class PointNotInCantorSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonterminatingTape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radix B = 2b.
inline long radix(int alphabet_size) { return 2L * alphabet_size; }

/// Digit value c(d) = 2d + 1/2.
Rational digit_value(int symbol);

/// Smallest and largest values of an encoded half-tape. hull_min is also the
/// value of an all-blank half-tape.
Rational hull_min(int alphabet_size);
Rational hull_max(int alphabet_size);

/// Width 1/(B-1) of the gap between consecutive cylinder hulls.
Rational cylinder_gap(int alphabet_size);

/// Closed hull of {x : t_0 = symbol}. Throws std::out_of_range if
/// symbol >= alphabet_size.
std::pair<Rational, Rational> cylinder_interval(int symbol, int alphabet_size);

TapePoint encode_tape(const Tape& tape, int alphabet_size);

/// Inverse of encode_tape on finitely supported tapes.
Tape decode_tape(const TapePoint& p, int alphabet_size, std::size_t max_cells = 4096);

/// Fixed point c(symbol)/(B-1) of the push/pop saddle for `symbol`.
Rational saddle_fixed_point(int symbol, int alphabet_size);

/// Affine image of a (written) tape under a head-right move that leaves
/// `written` behind: (x, y) -> (Bx - c, (y + c)/B).
TapePoint shift_right_map(const TapePoint& p, int written, int alphabet_size);

/// Affine image under a head-left move that pops `popped` from the left
/// half: (x, y) -> ((x + c)/B, By - c).
TapePoint shift_left_map(const TapePoint& p, int popped, int alphabet_size);

}  // namespace tmflow
