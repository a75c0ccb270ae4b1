#include "tmflow/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tmflow {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s, std::size_t line) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw TrajectoryIoError("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) return out;
    line.remove_prefix(comma + 1);
  }
}

void write_csv(std::ostream& out, const Trajectory& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

Trajectory read_csv(std::istream& in) {
  Trajectory t;
  std::string line;
  if (!std::getline(in, line)) throw TrajectoryIoError("empty trajectory file");
  for (auto c : split(line)) t.columns.emplace_back(c);
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.columns.size())
      throw TrajectoryIoError("line " + std::to_string(n) + ": expected " +
                              std::to_string(t.columns.size()) + " fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_double(c, n));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// JSON has no literal for non-finite values, and "-0" parses as an integer.
std::string json_number(double v) {
  if (!std::isfinite(v)) return '"' + format_double(v) + '"';
  if (v == 0.0 && std::signbit(v)) return "-0.0";
  return format_double(v);
}

// Each line is an object keyed by column name; key order follows the
// column order so files are stable.
void write_jsonl(std::ostream& out, const Trajectory& t) {
  for (const auto& row : t.rows) {
    out << '{';
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << '"' << t.columns[i] << "\":" << json_number(row[i]);
    out << "}\n";
  }
}

Trajectory read_jsonl(std::istream& in) {
  Trajectory t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    nlohmann::ordered_json obj;
    try {
      obj = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw TrajectoryIoError("line " + std::to_string(n) + ": " + e.what());
    }
    if (!obj.is_object()) throw TrajectoryIoError("line " + std::to_string(n) + ": expected an object");
    if (t.columns.empty())
      for (const auto& item : obj.items()) t.columns.push_back(item.key());
    if (obj.size() != t.columns.size())
      throw TrajectoryIoError("line " + std::to_string(n) + ": column mismatch");
    std::vector<double> row;
    for (const auto& c : t.columns) {
      const auto it = obj.find(c);
      if (it != obj.end() && it->is_string()) {
        row.push_back(parse_double(it->get<std::string>(), n));
        continue;
      }
      if (it == obj.end() || !it->is_number())
        throw TrajectoryIoError("line " + std::to_string(n) + ": missing or non-numeric '" + c + "'");
      row.push_back(it->get<double>());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

TrajectoryFormat parse_format(const std::string& s) {
  if (s == "csv") return TrajectoryFormat::Csv;
  if (s == "jsonl") return TrajectoryFormat::Jsonl;
  throw std::invalid_argument("unknown format '" + s + "' (csv|jsonl)");
}

void write_trajectory(std::ostream& out, const Trajectory& t, TrajectoryFormat f) {
  if (f == TrajectoryFormat::Csv) write_csv(out, t);
  else write_jsonl(out, t);
}

Trajectory read_trajectory(std::istream& in, TrajectoryFormat f) {
  return f == TrajectoryFormat::Csv ? read_csv(in) : read_jsonl(in);
}

void save_trajectory(const std::string& path, const Trajectory& t, TrajectoryFormat f) {
  std::ofstream out(path);
  if (!out) throw TrajectoryIoError("cannot open '" + path + "' for writing");
  write_trajectory(out, t, f);
  if (!out) throw TrajectoryIoError("write to '" + path + "' failed");
}

Trajectory load_trajectory(const std::string& path, TrajectoryFormat f) {
  std::ifstream in(path);
  if (!in) throw TrajectoryIoError("file not found: " + path);
  return read_trajectory(in, f);
}

}  // namespace tmflow
