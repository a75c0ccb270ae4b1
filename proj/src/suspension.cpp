#include "tmflow/suspension.hpp"

#include <cmath>

#include "tmflow/smooth.hpp"

namespace tmflow {

double wrap_unit(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

SuspensionField::SuspensionField(Layout layout, Schedule schedule)
    : layout_(std::move(layout)), schedule_(std::move(schedule)) {
  compiled_.reserve(schedule_.windows.size());
  for (const Window& w : schedule_.windows) {
    Compiled c;
    const Move& m = w.move;
    for (std::size_t i = 0; i < 4; ++i) {
      if (!m.gate.core[i]) continue;
      c.constrained[i] = true;
      c.lo[i] = to_double(m.gate.core[i]->lo);
      c.hi[i] = to_double(m.gate.core[i]->hi);
      c.band[i] = to_double(m.gate.band[i]);
    }
    c.kind = m.kind;
    for (std::size_t i = 0; i < 4; ++i) c.displacement[i] = to_double(m.displacement[i]);
    c.axis = m.axis;
    c.fixed_point = to_double(m.fixed_point);
    c.log_radix = std::log(static_cast<double>(m.radix));
    if (m.kind == MoveKind::Contract) {
      c.cx = to_double(m.center.x);
      c.cy = to_double(m.center.y);
      c.log_ratio = std::log(to_double(m.ratio));
    }
    compiled_.push_back(c);
  }
}

double SuspensionField::gate(std::size_t w, const Vec4& p) const {
  const Compiled& c = compiled_[w];
  double g = 1.0;
  for (std::size_t i = 0; i < 4 && g != 0.0; ++i) {
    if (!c.constrained[i]) continue;
    g *= smooth::plateau_value(wrap_unit(p[i]), c.lo[i], c.hi[i], c.band[i]);
  }
  return g;
}

Vec4 SuspensionField::eval(const Vec4& p, double s) const {
  Vec4 v{0.0, 0.0, 0.0, 0.0};
  const double clock = wrap_unit(s);
  auto w = schedule_.active(clock);
  if (!w) return v;
  const double omega = schedule_.profile(*w, clock);
  if (omega == 0.0) return v;
  const double g = gate(*w, p);
  if (g == 0.0) return v;
  const double k = omega * g;
  const Compiled& c = compiled_[*w];
  switch (c.kind) {
    case MoveKind::Translate:
      for (std::size_t i = 0; i < 4; ++i) v[i] = k * c.displacement[i];
      break;
    case MoveKind::Saddle: {
      const double dx = wrap_unit(p[TapeX]) - c.fixed_point;
      const double dy = wrap_unit(p[TapeY]) - c.fixed_point;
      if (c.axis == SaddleAxis::PopX) {
        v[TapeX] = k * c.log_radix * dx;
        v[TapeY] = -k * c.log_radix * dy;
      } else {
        v[TapeX] = -k * c.log_radix * dx;
        v[TapeY] = k * c.log_radix * dy;
      }
      break;
    }
    case MoveKind::Contract:
      v[StateX] = k * c.log_ratio * (wrap_unit(p[StateX]) - c.cx);
      v[StateY] = k * c.log_ratio * (wrap_unit(p[StateY]) - c.cy);
      break;
  }
  return v;
}

}  // namespace tmflow
