#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "tmflow/schedule.hpp"

namespace tmflow {

using Vec4 = std::array<double, 4>;

/// Reduce an angle to [0,1).
double wrap_unit(double v);

/// Time-periodic field V(p, s) on T^4 whose period map realizes the machine
/// step on encoded configurations. Immutable after construction; evaluation
/// is reentrant.
class SuspensionField {
 public:
  SuspensionField(Layout layout, Schedule schedule);

  const Layout& layout() const { return layout_; }
  const Schedule& schedule() const { return schedule_; }
  int alphabet_size() const { return layout_.alphabet_size; }

  /// V at angles p (any real values; reduced mod 1) and clock s.
  Vec4 eval(const Vec4& p, double s) const;

  /// Gate value of window w at p, in [0,1].
  double gate(std::size_t w, const Vec4& p) const;

 private:
  struct Compiled {
    std::array<bool, 4> constrained{};
    std::array<double, 4> lo{}, hi{}, band{};
    MoveKind kind = MoveKind::Translate;
    Vec4 displacement{};
    SaddleAxis axis = SaddleAxis::PopX;
    double fixed_point = 0.0;
    double log_radix = 0.0;
    double cx = 0.0, cy = 0.0, log_ratio = 0.0;
  };

  Layout layout_;
  Schedule schedule_;
  std::vector<Compiled> compiled_;
};

}  // namespace tmflow
