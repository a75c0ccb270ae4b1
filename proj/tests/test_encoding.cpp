#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tmflow/encoding.hpp"
#include "tmflow/layout.hpp"

using namespace tmflow;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

// Truncated digit series, independent of the closed-form tail.
TapePoint partial_sum(const Tape& t, int b, int terms) {
  const Rational B(2 * b);
  auto c = [](int d) -> Rational { return Rational(2 * d) + q(1, 2); };
  TapePoint p{0, 0};
  Rational scale = 1 / B;
  for (int n = 0; n < terms; ++n) {
    p.x += c(t.at(n)) * scale;
    p.y += c(t.at(-(n + 1))) * scale;
    scale /= B;
  }
  return p;
}

Tape random_tape(std::mt19937_64& rng, int b, std::size_t max_len = 10) {
  Tape t;
  t.left.resize(rng() % (max_len + 1));
  t.right.resize(rng() % (max_len + 1));
  for (auto& s : t.left) s = static_cast<int>(rng() % b);
  for (auto& s : t.right) s = static_cast<int>(rng() % b);
  t.head = static_cast<int>(rng() % b);
  t.canonicalize();
  return t;
}

Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace

TEST_CASE("worked encodings for b = 2") {
  CHECK(encode_tape(Tape{}, 2) == TapePoint{q(1, 6), q(1, 6)});
  Tape one;
  one.head = 1;
  CHECK(encode_tape(one, 2) == TapePoint{q(2, 3), q(1, 6)});
  Tape two;
  two.right = {1};
  CHECK(encode_tape(two, 2) == TapePoint{q(7, 24), q(1, 6)});
}

TEST_CASE("closed form agrees with 50-term partial sums") {
  std::mt19937_64 rng(5);
  for (int b = 2; b <= 4; ++b) {
    Rational tail_bound = 1;
    for (int k = 0; k < 49; ++k) tail_bound /= 2 * b;
    for (int i = 0; i < 50; ++i) {
      const Tape t = random_tape(rng, b);
      const TapePoint exact = encode_tape(t, b);
      const TapePoint approx = partial_sum(t, b, 50);
      CHECK(abs(exact.x - approx.x) <= tail_bound);
      CHECK(abs(exact.y - approx.y) <= tail_bound);
    }
  }
}

TEST_CASE("decode worked examples") {
  CHECK(decode_tape({q(1, 6), q(1, 6)}, 2) == Tape{});
  Tape one;
  one.head = 1;
  CHECK(decode_tape({q(2, 3), q(1, 6)}, 2) == one);
  CHECK_THROWS_AS(decode_tape({q(1, 2), q(1, 6)}, 2), PointNotInCantorSet);
}

TEST_CASE("decode rejects overlong support") {
  Tape t;
  t.right.assign(40, 1);
  CHECK_THROWS_AS(decode_tape(encode_tape(t, 2), 2, 10), NonterminatingTape);
  CHECK(decode_tape(encode_tape(t, 2), 2, 64) == t);
}

TEST_CASE("cylinder intervals") {
  CHECK(cylinder_interval(0, 2) == std::pair{q(1, 6), q(1, 3)});
  CHECK(cylinder_interval(1, 2) == std::pair{q(2, 3), q(5, 6)});
  CHECK(cylinder_interval(1, 2).first - cylinder_interval(0, 2).second == q(1, 3));
  CHECK_THROWS_AS(cylinder_interval(2, 2), std::out_of_range);

  std::mt19937_64 rng(3);
  for (int b = 2; b <= 4; ++b) {
    const Rational B(2 * b);
    CHECK(cylinder_gap(b) == 1 / (B - 1));
    CHECK(hull_min(b) == 1 / (2 * (B - 1)));
    CHECK(hull_max(b) == (Rational(2 * b) - q(3, 2)) / (B - 1));
    for (int s = 0; s + 1 < b; ++s)
      CHECK(cylinder_interval(s + 1, b).first - cylinder_interval(s, b).second == 1 / (B - 1));
    // Extremal tapes with t0 = s reach both ends of the hull.
    for (int s = 0; s < b; ++s) {
      Tape lo;
      lo.head = s;
      CHECK(encode_tape(lo, b).x == cylinder_interval(s, b).first);
      for (int i = 0; i < 100; ++i) {
        Tape t = random_tape(rng, b);
        t.head = s;
        const Rational x = encode_tape(t, b).x;
        CHECK(x >= cylinder_interval(s, b).first);
        CHECK(x <= cylinder_interval(s, b).second);
      }
    }
  }
}

TEST_CASE("decode inverts encode on random tapes") {
  std::mt19937_64 rng(42);
  for (int b = 2; b <= 4; ++b) {
    for (int i = 0; i < 1000; ++i) {
      const Tape t = random_tape(rng, b);
      const TapePoint p = encode_tape(t, b);
      CHECK(decode_tape(p, b) == t);
      // Image lies in the hull, strictly inside the unit square.
      CHECK(p.x >= hull_min(b));
      CHECK(p.x <= hull_max(b));
      CHECK(p.y >= hull_min(b));
      CHECK(p.y <= hull_max(b));
      CHECK(hull_min(b) > 0);
      CHECK(hull_max(b) < 1);
    }
  }
}

TEST_CASE("shift maps are exactly conjugate to tape shifts") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const int b = 2 + static_cast<int>(rng() % 3);
    Tape t = random_tape(rng, b);
    const int w = static_cast<int>(rng() % b);
    Tape written = t;
    written.set(0, w);
    const TapePoint before = encode_tape(written, b);

    Tape right = written;
    right.shift(Shift::Right);
    CHECK(shift_right_map(before, w, b) == encode_tape(right, b));

    // Direct affine formula.
    const Rational B(2 * b);
    const Rational c = digit_value(w);
    CHECK(encode_tape(right, b) == TapePoint{B * before.x - c, before.y / B + c / B});

    Tape left = written;
    left.shift(Shift::Left);
    const int popped = written.at(-1);
    CHECK(shift_left_map(before, popped, b) == encode_tape(left, b));
    const Rational cp = digit_value(popped);
    CHECK(encode_tape(left, b) == TapePoint{(before.x + cp) / B, B * before.y - cp});
  }
}

TEST_CASE("saddle fixed points") {
  for (int b = 2; b <= 4; ++b)
    for (int s = 0; s < b; ++s) {
      const Rational g = saddle_fixed_point(s, b);
      CHECK(g == digit_value(s) / (Rational(2 * b) - 1));
      // Fixed by the right-shift map with written digit s.
      CHECK(shift_right_map({g, g}, s, b) == TapePoint{g, g});
    }
}

TEST_CASE("encode_config places states at square centres") {
  const TMSpec spec = load_tm_file(TMFLOW_DATA_DIR "/halt3.tm");
  const Layout layout = build_layout(spec);
  const Config4 start = encode_config(spec, start_config(spec), layout);
  CHECK(start.state == layout.squares[layout.state_square[spec.start]].center);
  CHECK(start.tape == TapePoint{q(1, 6), q(1, 6)});

  Tape t;
  t.right = {1, 0, 1};
  const Config4 halted = encode_config(spec, Configuration{spec.halt, t}, layout);
  CHECK(halted.state == layout.squares[layout.state_square[spec.halt]].center);

  for (std::size_t s = 0; s < spec.num_states(); ++s)
    CHECK(classify_state(layout, encode_config(spec, Configuration{s, t}, layout).state) == s);
}
