#include "tmflow/encoding.hpp"

#include <string>

namespace tmflow {

Rational digit_value(int symbol) { return make_rational(4L * symbol + 1, 2); }

Rational hull_min(int alphabet_size) { return make_rational(1, 2 * (radix(alphabet_size) - 1)); }

Rational hull_max(int alphabet_size) {
  Rational r = digit_value(alphabet_size - 1) / (radix(alphabet_size) - 1);
  r.canonicalize();
  return r;
}

Rational cylinder_gap(int alphabet_size) { return make_rational(1, radix(alphabet_size) - 1); }

std::pair<Rational, Rational> cylinder_interval(int symbol, int alphabet_size) {
  if (symbol < 0 || symbol >= alphabet_size)
    throw std::out_of_range("symbol " + std::to_string(symbol) + " >= alphabet size " +
                            std::to_string(alphabet_size));
  const long B = radix(alphabet_size);
  Rational c = digit_value(symbol);
  Rational lo = (c + hull_min(alphabet_size)) / B;
  Rational hi = (c + hull_max(alphabet_size)) / B;
  lo.canonicalize();
  hi.canonicalize();
  return {lo, hi};
}

namespace {

// Sum_{k>=0} c(d_k) B^-(k+1) followed by an all-blank tail.
Rational encode_half(const std::vector<int>& digits, int b) {
  const long B = radix(b);
  Rational value = hull_min(b);
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    value = (digit_value(*it) + value) / B;
  }
  value.canonicalize();
  return value;
}

std::vector<int> decode_half(Rational v, int b, std::size_t max_cells) {
  const long B = radix(b);
  const Rational lo = hull_min(b);
  const Rational hi = hull_max(b);
  std::vector<int> digits;
  while (v != lo) {
    if (digits.size() >= max_cells)
      throw NonterminatingTape("tape support exceeds " + std::to_string(max_cells) + " cells");
    Rational scaled = v * B;
    int found = -1;
    for (int d = 0; d < b; ++d) {
      Rational c = digit_value(d);
      if (scaled >= c + lo && scaled <= c + hi) {
        found = d;
        break;
      }
    }
    if (found < 0)
      throw PointNotInCantorSet("digit " + std::to_string(digits.size()) + " falls in a gap");
    digits.push_back(found);
    v = scaled - digit_value(found);
    v.canonicalize();
  }
  while (!digits.empty() && digits.back() == 0) digits.pop_back();
  return digits;
}

}  // namespace

TapePoint encode_tape(const Tape& tape, int alphabet_size) {
  std::vector<int> forward;
  forward.reserve(tape.right.size() + 1);
  forward.push_back(tape.head);
  forward.insert(forward.end(), tape.right.begin(), tape.right.end());
  return {encode_half(forward, alphabet_size), encode_half(tape.left, alphabet_size)};
}

Tape decode_tape(const TapePoint& p, int alphabet_size, std::size_t max_cells) {
  auto forward = decode_half(p.x, alphabet_size, max_cells);
  Tape t;
  t.left = decode_half(p.y, alphabet_size, max_cells);
  if (!forward.empty()) {
    t.head = forward.front();
    t.right.assign(forward.begin() + 1, forward.end());
  }
  t.canonicalize();
  return t;
}

Rational saddle_fixed_point(int symbol, int alphabet_size) {
  Rational g = digit_value(symbol) / (radix(alphabet_size) - 1);
  g.canonicalize();
  return g;
}

TapePoint shift_right_map(const TapePoint& p, int written, int alphabet_size) {
  const long B = radix(alphabet_size);
  const Rational c = digit_value(written);
  TapePoint out{p.x * B - c, (p.y + c) / B};
  out.x.canonicalize();
  out.y.canonicalize();
  return out;
}

TapePoint shift_left_map(const TapePoint& p, int popped, int alphabet_size) {
  const long B = radix(alphabet_size);
  const Rational c = digit_value(popped);
  TapePoint out{(p.x + c) / B, p.y * B - c};
  out.x.canonicalize();
  out.y.canonicalize();
  return out;
}

}  // namespace tmflow
