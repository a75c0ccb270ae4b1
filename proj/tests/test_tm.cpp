#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "tmflow/tm.hpp"

using namespace tmflow;

namespace {

const char* kSmallest = "alphabet:2\nstates: START,HALT\nSTART 0 -> HALT 1 N\nSTART 1 -> HALT 1 N\n";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_tm(text);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TMSpec one_rule(const std::string& rule) {
  return parse_tm("alphabet: 2\nstates: START,HALT\n" + rule + "\nSTART 1 -> HALT 1 N\n");
}

}  // namespace

TEST_CASE("smallest legal machine") {
  const TMSpec spec = parse_tm(kSmallest);
  CHECK(spec.alphabet_size == 2);
  CHECK(spec.states == std::vector<std::string>{"START", "HALT"});
  CHECK(spec.start == 0);
  CHECK(spec.halt == 1);
  const Transition& t = spec.delta(0, 0);
  CHECK(t.next == 1);
  CHECK(t.write == 1);
  CHECK(t.shift == Shift::None);
}

TEST_CASE("parse errors") {
  SUBCASE("symbol out of alphabet") {
    CHECK(error_of("alphabet:2\nstates: START,HALT\nSTART 2 -> HALT 1 N\nSTART 1 -> HALT 1 N\n")
              .find("symbol 2 >= alphabet size") != std::string::npos);
  }
  SUBCASE("written symbol out of alphabet") {
    CHECK(error_of("alphabet:2\nstates: START,HALT\nSTART 0 -> HALT 3 N\nSTART 1 -> HALT 1 N\n")
              .find("symbol 3 >= alphabet size") != std::string::npos);
  }
  SUBCASE("duplicate state") {
    CHECK(error_of("alphabet:2\nstates: START,START,HALT\nSTART 0 -> HALT 1 N\n")
              .find("duplicate state") != std::string::npos);
  }
  SUBCASE("missing transition") {
    CHECK(error_of("alphabet:2\nstates: START,HALT\nSTART 0 -> HALT 1 N\n")
              .find("missing transition") != std::string::npos);
  }
  SUBCASE("transition out of HALT") {
    CHECK(error_of(std::string(kSmallest) + "HALT 0 -> START 0 N\n")
              .find("halt state") != std::string::npos);
  }
  SUBCASE("alphabet out of range") {
    CHECK(error_of("alphabet:1\nstates: START,HALT\n").find("out of range") != std::string::npos);
    CHECK(error_of("alphabet:11\nstates: START,HALT\n").find("out of range") != std::string::npos);
  }
  SUBCASE("unknown state") {
    CHECK(error_of("alphabet:2\nstates: START,HALT\nSTART 0 -> NOPE 1 N\nSTART 1 -> HALT 1 N\n")
              .find("unknown state") != std::string::npos);
  }
  SUBCASE("syntax error carries a position") {
    try {
      parse_tm("alphabet:2\nstates: START,HALT\nSTART 0 => HALT 1 N\n");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() > 0);
    }
  }
  SUBCASE("bad direction") {
    CHECK_THROWS_AS(one_rule("START 0 -> HALT 1 X"), FormatError);
  }
  SUBCASE("duplicate transition") {
    CHECK_THROWS_AS(parse_tm(std::string(kSmallest) + "START 0 -> HALT 0 N\n"), FormatError);
  }
}

TEST_CASE("headers are order-insensitive and comments are ignored") {
  const TMSpec a = parse_tm(kSmallest);
  const TMSpec b = parse_tm(
      "# comment\nSTART 1 -> HALT 1 N   # trailing\nhalt: HALT\nstart: START\n"
      "START 0 -> HALT 1 N\nstates: START , HALT\nalphabet: 2\n");
  CHECK(serialize_tm(a) == serialize_tm(b));
}

TEST_CASE("explicit start and halt names") {
  const TMSpec spec = parse_tm(
      "alphabet: 2\nstates: go, stop\nstart: go\nhalt: stop\ngo 0 -> stop 1 N\ngo 1 -> stop 0 N\n");
  CHECK(spec.start == 0);
  CHECK(spec.halt == 1);
}

TEST_CASE("halt3.tm round-trips through the serializer") {
  const std::string text = read_file(TMFLOW_DATA_DIR "/halt3.tm");
  const std::string canonical = serialize_tm(parse_tm(text));
  CHECK(serialize_tm(parse_tm(canonical)) == canonical);
}

TEST_CASE("every shipped machine round-trips") {
  for (const char* name : {"halt3.tm", "loop.tm", "one-step.tm", "bb-small.tm"}) {
    CAPTURE(name);
    const TMSpec spec = load_tm_file(std::string(TMFLOW_DATA_DIR "/") + name);
    CHECK(serialize_tm(parse_tm(serialize_tm(spec))) == serialize_tm(spec));
  }
}

TEST_CASE("missing file") {
  try {
    load_tm_file("/nonexistent/machine.tm");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("file not found") != std::string::npos);
  }
}

TEST_CASE("tape literals") {
  const Tape t = parse_tape_literal("...01[1]10...", 2);
  CHECK(t.head == 1);
  CHECK(t.at(-1) == 1);
  CHECK(t.at(-2) == 0);
  CHECK(t.at(1) == 1);
  CHECK(t.at(2) == 0);
  CHECK(t.at(100) == 0);
  CHECK(parse_tape_literal("…00[1]0…", 2) == parse_tape_literal("[1]", 2));
  CHECK(format_tape_literal(parse_tape_literal("01[1]10", 2)) == "1[1]1");
  CHECK(parse_tape_literal(format_tape_literal(t), 2) == t);
  CHECK_THROWS_AS(parse_tape_literal("0[2]", 2), FormatError);
  CHECK_THROWS_AS(parse_tape_literal("010", 2), FormatError);
  CHECK_THROWS_AS(parse_tape_literal("[0][1]", 2), FormatError);
}

TEST_CASE("step writes then shifts") {
  SUBCASE("no shift") {
    const TMSpec spec = parse_tm(kSmallest);
    const auto next = step(spec, start_config(spec));
    REQUIRE(next);
    CHECK(next->state == spec.halt);
    CHECK(next->tape.head == 1);
    CHECK(next->tape.is_canonical());
  }
  SUBCASE("head moves right") {
    const TMSpec spec = one_rule("START 0 -> START 1 R");
    const auto next = step(spec, start_config(spec));
    REQUIRE(next);
    CHECK(next->tape.at(-1) == 1);
    CHECK(next->tape.head == 0);
  }
  SUBCASE("head moves left") {
    const TMSpec spec = one_rule("START 0 -> START 1 L");
    const auto next = step(spec, start_config(spec));
    REQUIRE(next);
    CHECK(next->tape.at(1) == 1);
    CHECK(next->tape.head == 0);
  }
  SUBCASE("halted configurations do not step") {
    const TMSpec spec = parse_tm(kSmallest);
    CHECK_FALSE(step(spec, Configuration{spec.halt, {}}));
  }
}

TEST_CASE("run on the shipped machines") {
  const TMSpec halt3 = load_tm_file(TMFLOW_DATA_DIR "/halt3.tm");
  const auto out = run(halt3, start_config(halt3), 100);
  REQUIRE(std::holds_alternative<Halted>(out));
  CHECK(std::get<Halted>(out).steps == 3);

  // Hand trace: START 0 -> A 1 R, A 0 -> A 1 N, A 1 -> HALT 0 R.
  Tape expected;
  expected.left = {0, 1};
  expected.canonicalize();
  CHECK(std::get<Halted>(out).tape == expected);

  const TMSpec bb = load_tm_file(TMFLOW_DATA_DIR "/bb-small.tm");
  const auto bb_out = run(bb, start_config(bb), 1000);
  REQUIRE(std::holds_alternative<Halted>(bb_out));
  CHECK(std::get<Halted>(bb_out).steps == 10);

  const TMSpec one = load_tm_file(TMFLOW_DATA_DIR "/one-step.tm");
  CHECK(std::get<Halted>(run(one, start_config(one), 10)).steps == 1);

  const TMSpec loop = load_tm_file(TMFLOW_DATA_DIR "/loop.tm");
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    Tape t;
    for (int k = 0; k < 5; ++k) t.right.push_back(static_cast<int>(rng() % 2));
    CHECK(std::holds_alternative<StillRunning>(run(loop, start_config(loop, t), 500)));
  }
}

TEST_CASE("zero budget leaves the machine running") {
  for (const char* name : {"halt3.tm", "loop.tm", "one-step.tm", "bb-small.tm"}) {
    const TMSpec spec = load_tm_file(std::string(TMFLOW_DATA_DIR "/") + name);
    const auto out = run(spec, start_config(spec), 0);
    REQUIRE(std::holds_alternative<StillRunning>(out));
    CHECK(std::get<StillRunning>(out).config.state == spec.start);
  }
}

TEST_CASE("determinism and canonicality along runs") {
  const TMSpec bb = load_tm_file(TMFLOW_DATA_DIR "/bb-small.tm");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    Tape t;
    for (int k = 0; k < 4; ++k) t.left.push_back(static_cast<int>(rng() % 2));
    for (int k = 0; k < 4; ++k) t.right.push_back(static_cast<int>(rng() % 2));
    t.head = static_cast<int>(rng() % 2);
    t.canonicalize();
    Configuration c = start_config(bb, t);
    for (int k = 0; k < 30; ++k) {
      auto a = step(bb, c);
      auto b = step(bb, c);
      CHECK(a == b);
      if (!a) break;
      Tape copy = a->tape;
      copy.canonicalize();
      CHECK(copy == a->tape);
      c = *a;
    }
    const auto r1 = run(bb, start_config(bb, t), 200);
    const auto r2 = run(bb, start_config(bb, t), 200);
    CHECK(r1.index() == r2.index());
  }
}

TEST_CASE("right then left shift restores random tapes") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const int b = 2 + static_cast<int>(rng() % 3);
    Tape t;
    t.left.resize(rng() % 8);
    t.right.resize(rng() % 8);
    for (auto& s : t.left) s = static_cast<int>(rng() % b);
    for (auto& s : t.right) s = static_cast<int>(rng() % b);
    t.head = static_cast<int>(rng() % b);
    t.canonicalize();
    const int w = static_cast<int>(rng() % b);

    Tape a = t;
    a.set(0, w);
    a.shift(Shift::Right);
    a.shift(Shift::Left);
    a.set(0, w);
    Tape expected = t;
    expected.set(0, w);
    expected.canonicalize();
    CHECK(a == expected);

    Tape c = t;
    c.set(0, w);
    c.shift(Shift::Left);
    c.shift(Shift::Right);
    CHECK(c == expected);
  }
}
