#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tmflow {

/// Error raised while reading a machine description or a tape literal.
/// `line` and `column` are 1-based; 0 means "not tied to a position".
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, int line = 0, int column = 0);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Tape shift applied after the write. Right means the head moves right,
/// i.e. the tape is shifted left (epsilon = +1).
enum class Shift : int { Left = -1, None = 0, Right = 1 };

struct Transition {
  std::size_t next = 0;
  int write = 0;
  Shift shift = Shift::None;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// A deterministic single-tape machine with a total transition table off HALT.
struct TMSpec {
  int alphabet_size = 2;
  std::vector<std::string> states;
  std::size_t start = 0;
  std::size_t halt = 1;
  /// Indexed by state * alphabet_size + symbol; empty exactly for HALT rows.
  std::vector<std::optional<Transition>> table;

  std::size_t num_states() const { return states.size(); }
  bool is_halt(std::size_t q) const { return q == halt; }
  const Transition& delta(std::size_t q, int symbol) const;
  std::optional<std::size_t> find_state(std::string_view name) const;
};

/// Parse the text format:
///
///     alphabet: 2
///     states: START, A, HALT
///     start: START          # optional, defaults to the state named START
///     halt: HALT            # optional, defaults to the state named HALT
///     START 0 -> A 1 R
///
/// Lines may appear in any order; `#` starts a comment. Direction letters
/// are head motions: R = +1 (tape left-shift), L = -1, N = 0.
TMSpec parse_tm(std::string_view text);

/// Canonical text: header lines, then transitions ordered by (state, symbol).
std::string serialize_tm(const TMSpec& spec);

TMSpec load_tm_file(const std::string& path);

/// Finitely supported tape with blank symbol 0. `left[i]` is cell -(i+1),
/// `right[i]` is cell i+1. Canonical form carries no trailing blanks.
struct Tape {
  std::vector<int> left;
  int head = 0;
  std::vector<int> right;

  int at(long cell) const;
  void set(long cell, int symbol);
  void canonicalize();
  bool is_canonical() const;
  /// Apply a shift. Right: new cell n holds old cell n+1.
  void shift(Shift s);

  friend bool operator==(const Tape&, const Tape&) = default;
};

/// Tape literal such as "...01[1]10..." with exactly one bracketed head cell.
/// Leading/trailing "..." (or the unicode ellipsis) are accepted and ignored.
Tape parse_tape_literal(std::string_view text, int alphabet_size);
std::string format_tape_literal(const Tape& tape);

struct Configuration {
  std::size_t state = 0;
  Tape tape;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// One application of the step map. Returns nullopt when `c` is already
/// in HALT.
std::optional<Configuration> step(const TMSpec& spec, const Configuration& c);

struct Halted {
  std::size_t steps = 0;
  Tape tape;
};

struct StillRunning {
  Configuration config;
};

using RunOutcome = std::variant<Halted, StillRunning>;

RunOutcome run(const TMSpec& spec, Configuration c0, std::size_t max_steps);

inline Configuration start_config(const TMSpec& spec, Tape tape = {}) {
  tape.canonicalize();
  return Configuration{spec.start, std::move(tape)};
}

}  // namespace tmflow
