#pragma once

#include <iosfwd>
#include <string>

#include "tmflow/runtime.hpp"

namespace tmflow {

enum class TrajectoryFormat { Csv, Jsonl };

TrajectoryFormat parse_format(const std::string& s);

class TrajectoryIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values are written in shortest round-trip form, so reading back yields
/// bit-identical doubles.
void write_trajectory(std::ostream& out, const Trajectory& t, TrajectoryFormat f);
Trajectory read_trajectory(std::istream& in, TrajectoryFormat f);

void save_trajectory(const std::string& path, const Trajectory& t, TrajectoryFormat f);
Trajectory load_trajectory(const std::string& path, TrajectoryFormat f);

}  // namespace tmflow
