#include "tmflow/tm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tmflow {

FormatError::FormatError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + what
                                  : what),
      line_(line),
      column_(column) {}

const Transition& TMSpec::delta(std::size_t q, int symbol) const {
  const auto& t = table.at(q * static_cast<std::size_t>(alphabet_size) +
                           static_cast<std::size_t>(symbol));
  if (!t) throw std::logic_error("no transition out of HALT");
  return *t;
}

std::optional<std::size_t> TMSpec::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == name) return i;
  return std::nullopt;
}

namespace {

constexpr int kMaxAlphabet = 10;

struct Token {
  std::string text;
  int column;  // 1-based
};

std::vector<Token> split_ws(std::string_view line, int first_column) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({std::string(line.substr(i, j - i)), first_column + static_cast<int>(i)});
    i = j;
  }
  return out;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct RawTransition {
  Token from, read, to, write, dir;
  int line;
};

struct Header {
  std::string value;
  int line = 0;
  int column = 0;
};

}  // namespace

TMSpec parse_tm(std::string_view text) {
  std::optional<Header> alphabet, states, start, halt;
  std::vector<RawTransition> raw;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      if (eol == text.size()) break;
      continue;
    }

    auto colon = line.find(':');
    if (colon != std::string_view::npos) {
      auto key_raw = line.substr(0, colon);
      std::string key(trim(key_raw));
      std::size_t key_col = key_raw.find_first_not_of(" \t") + 1;
      std::string_view value_raw = line.substr(colon + 1);
      std::size_t lead = value_raw.find_first_not_of(" \t");
      int value_col = static_cast<int>(colon) + 2 +
                      static_cast<int>(lead == std::string_view::npos ? 0 : lead);
      Header h{std::string(trim(value_raw)), line_no, value_col};
      std::optional<Header>* slot = nullptr;
      if (key == "alphabet") slot = &alphabet;
      else if (key == "states") slot = &states;
      else if (key == "start") slot = &start;
      else if (key == "halt") slot = &halt;
      else
        throw FormatError("unknown header '" + key + "'", line_no, static_cast<int>(key_col));
      if (*slot)
        throw FormatError("duplicate header '" + key + "'", line_no, static_cast<int>(key_col));
      *slot = std::move(h);
    } else {
      auto toks = split_ws(line, 1);
      if (toks.size() != 6 || toks[2].text != "->") {
        int col = toks.size() > 2 ? toks[2].column : toks.back().column;
        throw FormatError("expected '<state> <symbol> -> <state> <symbol> <R|L|N>'", line_no,
                          col);
      }
      raw.push_back({toks[0], toks[1], toks[3], toks[4], toks[5], line_no});
    }
    if (eol == text.size()) break;
  }

  if (!alphabet) throw FormatError("missing 'alphabet:' header");
  if (!states) throw FormatError("missing 'states:' header");

  TMSpec spec;
  auto b = parse_int(alphabet->value);
  if (!b)
    throw FormatError("alphabet size must be an integer", alphabet->line, alphabet->column);
  if (*b < 2 || *b > kMaxAlphabet)
    throw FormatError("alphabet size " + std::to_string(*b) + " out of range [2, " +
                          std::to_string(kMaxAlphabet) + "]",
                      alphabet->line, alphabet->column);
  spec.alphabet_size = *b;

  {
    std::string_view list = states->value;
    int col = states->column;
    while (true) {
      auto comma = list.find(',');
      std::string_view item = list.substr(0, comma);
      std::size_t lead = item.find_first_not_of(" \t");
      std::string name(trim(item));
      int item_col = col + static_cast<int>(lead == std::string_view::npos ? 0 : lead);
      if (!valid_name(name)) throw FormatError("invalid state name '" + name + "'", states->line, item_col);
      if (spec.find_state(name))
        throw FormatError("duplicate state '" + name + "'", states->line, item_col);
      spec.states.push_back(name);
      if (comma == std::string_view::npos) break;
      col += static_cast<int>(comma) + 1;
      list = list.substr(comma + 1);
    }
  }

  auto resolve = [&](const std::string& name, int line, int col) {
    auto idx = spec.find_state(name);
    if (!idx) throw FormatError("unknown state '" + name + "'", line, col);
    return *idx;
  };
  spec.start = start ? resolve(start->value, start->line, start->column)
                     : resolve("START", 0, 0);
  spec.halt = halt ? resolve(halt->value, halt->line, halt->column) : resolve("HALT", 0, 0);
  if (spec.start == spec.halt) throw FormatError("start state must differ from halt state");

  const auto nb = static_cast<std::size_t>(spec.alphabet_size);
  spec.table.assign(spec.states.size() * nb, std::nullopt);

  auto symbol = [&](const Token& t, int line) {
    auto v = parse_int(t.text);
    if (!v || *v < 0) throw FormatError("invalid symbol '" + t.text + "'", line, t.column);
    if (*v >= spec.alphabet_size)
      throw FormatError("symbol " + std::to_string(*v) + " >= alphabet size " +
                            std::to_string(spec.alphabet_size),
                        line, t.column);
    return *v;
  };

  for (const auto& r : raw) {
    std::size_t from = resolve(r.from.text, r.line, r.from.column);
    int read = symbol(r.read, r.line);
    std::size_t to = resolve(r.to.text, r.line, r.to.column);
    int write = symbol(r.write, r.line);
    Shift dir;
    if (r.dir.text == "R") dir = Shift::Right;
    else if (r.dir.text == "L") dir = Shift::Left;
    else if (r.dir.text == "N") dir = Shift::None;
    else
      throw FormatError("direction must be R, L or N", r.line, r.dir.column);
    if (from == spec.halt)
      throw FormatError("transition declared for halt state '" + r.from.text + "'", r.line,
                        r.from.column);
    auto& slot = spec.table[from * nb + static_cast<std::size_t>(read)];
    if (slot)
      throw FormatError("duplicate transition for (" + r.from.text + ", " + r.read.text + ")",
                        r.line, r.from.column);
    slot = Transition{to, write, dir};
  }

  for (std::size_t q = 0; q < spec.states.size(); ++q) {
    if (q == spec.halt) continue;
    for (int s = 0; s < spec.alphabet_size; ++s)
      if (!spec.table[q * nb + static_cast<std::size_t>(s)])
        throw FormatError("missing transition for (" + spec.states[q] + ", " +
                          std::to_string(s) + ")");
  }
  return spec;
}

std::string serialize_tm(const TMSpec& spec) {
  std::ostringstream os;
  os << "alphabet: " << spec.alphabet_size << "\n";
  os << "states: ";
  for (std::size_t i = 0; i < spec.states.size(); ++i) os << (i ? "," : "") << spec.states[i];
  os << "\nstart: " << spec.states[spec.start] << "\n";
  os << "halt: " << spec.states[spec.halt] << "\n";
  for (std::size_t q = 0; q < spec.states.size(); ++q) {
    if (q == spec.halt) continue;
    for (int s = 0; s < spec.alphabet_size; ++s) {
      const auto& t = spec.delta(q, s);
      char dir = t.shift == Shift::Right ? 'R' : t.shift == Shift::Left ? 'L' : 'N';
      os << spec.states[q] << ' ' << s << " -> " << spec.states[t.next] << ' ' << t.write << ' '
         << dir << "\n";
    }
  }
  return os.str();
}

TMSpec load_tm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("file not found: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tm(ss.str());
}

int Tape::at(long cell) const {
  if (cell == 0) return head;
  if (cell > 0) {
    auto i = static_cast<std::size_t>(cell - 1);
    return i < right.size() ? right[i] : 0;
  }
  auto i = static_cast<std::size_t>(-cell - 1);
  return i < left.size() ? left[i] : 0;
}

void Tape::set(long cell, int symbol) {
  if (cell == 0) {
    head = symbol;
    return;
  }
  auto& side = cell > 0 ? right : left;
  auto i = static_cast<std::size_t>((cell > 0 ? cell : -cell) - 1);
  if (i >= side.size()) {
    if (symbol == 0) return;
    side.resize(i + 1, 0);
  }
  side[i] = symbol;
  canonicalize();
}

void Tape::canonicalize() {
  while (!left.empty() && left.back() == 0) left.pop_back();
  while (!right.empty() && right.back() == 0) right.pop_back();
}

bool Tape::is_canonical() const {
  return (left.empty() || left.back() != 0) && (right.empty() || right.back() != 0);
}

void Tape::shift(Shift s) {
  if (s == Shift::Right) {
    left.insert(left.begin(), head);
    if (right.empty()) {
      head = 0;
    } else {
      head = right.front();
      right.erase(right.begin());
    }
  } else if (s == Shift::Left) {
    right.insert(right.begin(), head);
    if (left.empty()) {
      head = 0;
    } else {
      head = left.front();
      left.erase(left.begin());
    }
  }
  canonicalize();
}

Tape parse_tape_literal(std::string_view text, int alphabet_size) {
  std::string s(trim(text));
  auto strip = [&](std::string_view pat) {
    if (s.rfind(pat, 0) == 0) s.erase(0, pat.size());
    if (s.size() >= pat.size() && s.compare(s.size() - pat.size(), pat.size(), pat) == 0)
      s.erase(s.size() - pat.size());
  };
  strip("...");
  strip("\xE2\x80\xA6");  // U+2026

  auto open = s.find('[');
  auto close = s.find(']');
  if (open == std::string::npos || close != open + 2 || s.find('[', open + 1) != std::string::npos ||
      s.find(']', close + 1) != std::string::npos)
    throw FormatError("tape literal needs exactly one bracketed head cell, e.g. \"01[1]0\"");

  auto digit = [&](char c, std::size_t col) {
    if (c < '0' || c > '9')
      throw FormatError(std::string("invalid tape symbol '") + c + "'", 1, static_cast<int>(col + 1));
    int v = c - '0';
    if (v >= alphabet_size)
      throw FormatError("tape symbol " + std::to_string(v) + " >= alphabet size " +
                            std::to_string(alphabet_size),
                        1, static_cast<int>(col + 1));
    return v;
  };

  Tape t;
  t.head = digit(s[open + 1], open + 1);
  for (std::size_t i = 0; i < open; ++i) t.left.insert(t.left.begin(), digit(s[i], i));
  for (std::size_t i = close + 1; i < s.size(); ++i) t.right.push_back(digit(s[i], i));
  t.canonicalize();
  return t;
}

std::string format_tape_literal(const Tape& tape) {
  std::string out;
  for (auto it = tape.left.rbegin(); it != tape.left.rend(); ++it) out += static_cast<char>('0' + *it);
  out += '[';
  out += static_cast<char>('0' + tape.head);
  out += ']';
  for (int v : tape.right) out += static_cast<char>('0' + v);
  return out;
}

std::optional<Configuration> step(const TMSpec& spec, const Configuration& c) {
  if (spec.is_halt(c.state)) return std::nullopt;
  const auto& t = spec.delta(c.state, c.tape.head);
  Configuration next{t.next, c.tape};
  next.tape.head = t.write;
  next.tape.shift(t.shift);
  return next;
}

RunOutcome run(const TMSpec& spec, Configuration c0, std::size_t max_steps) {
  std::size_t n = 0;
  while (!spec.is_halt(c0.state)) {
    if (n == max_steps) return StillRunning{std::move(c0)};
    c0 = *step(spec, c0);
    ++n;
  }
  return Halted{n, std::move(c0.tape)};
}

}  // namespace tmflow
