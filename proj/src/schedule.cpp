#include "tmflow/schedule.hpp"

#include <algorithm>
#include <set>

#include "tmflow/smooth.hpp"

namespace tmflow {

namespace {

const Rational& coord(const Config4& p, std::size_t i) {
  switch (i) {
    case StateX: return p.state.x;
    case StateY: return p.state.y;
    case TapeX: return p.tape.x;
    default: return p.tape.y;
  }
}

Gate state_gate(const Rect& core, const Rational& band) {
  Gate g;
  g.core[StateX] = Interval{core.x0, core.x1};
  g.core[StateY] = Interval{core.y0, core.y1};
  g.band[StateX] = band;
  g.band[StateY] = band;
  return g;
}

void gate_tape(Gate& g, std::size_t axis, const Interval& raw, const Layout& L) {
  g.core[axis] = Interval{raw.lo - L.tape_core_margin, raw.hi + L.tape_core_margin};
  g.band[axis] = L.tape_band;
}

std::string branch_label(const TMSpec& spec, const Branch& br) {
  return spec.states[br.state] + "," + std::to_string(br.read);
}

}  // namespace

Gate::Membership Gate::classify(const Config4& p) const {
  bool all_core = true;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!core[i]) continue;
    const Rational& v = coord(p, i);
    const auto& iv = *core[i];
    if (v <= iv.lo - band[i] || v >= iv.hi + band[i]) return Membership::Outside;
    if (v < iv.lo || v > iv.hi) all_core = false;
  }
  return all_core ? Membership::Core : Membership::Ring;
}

Config4 Move::apply(const Config4& p) const {
  Config4 out = p;
  switch (kind) {
    case MoveKind::Translate:
      out.state.x += displacement[StateX];
      out.state.y += displacement[StateY];
      out.tape.x += displacement[TapeX];
      out.tape.y += displacement[TapeY];
      break;
    case MoveKind::Saddle: {
      const Rational& g = fixed_point;
      if (axis == SaddleAxis::PopX) {
        out.tape.x = g + (p.tape.x - g) * radix;
        out.tape.y = g + (p.tape.y - g) / radix;
      } else {
        out.tape.x = g + (p.tape.x - g) / radix;
        out.tape.y = g + (p.tape.y - g) * radix;
      }
      break;
    }
    case MoveKind::Contract:
      out.state.x = center.x + ratio * (p.state.x - center.x);
      out.state.y = center.y + ratio * (p.state.y - center.y);
      break;
  }
  return out;
}

double Schedule::profile(std::size_t w, double s) const {
  const Window& win = windows[w];
  const double width = win.end - win.start;
  return smooth::window_bump((s - win.start) / width, ramp) /
         (width * smooth::window_bump_integral(ramp));
}

std::optional<std::size_t> Schedule::active(double s) const {
  auto it = std::upper_bound(windows.begin(), windows.end(), s,
                             [](double v, const Window& w) { return v < w.start; });
  if (it == windows.begin()) return std::nullopt;
  --it;
  if (s > it->end) return std::nullopt;
  return static_cast<std::size_t>(it - windows.begin());
}

Schedule build_schedule(const TMSpec& spec, const Layout& L) {
  const int b = spec.alphabet_size;
  const long B = radix(b);
  const Interval hull{hull_min(b), hull_max(b)};
  Schedule sched;
  std::vector<Window> phase_a, phase_b;

  auto leg_window = [&](std::size_t li, Phase phase) {
    const Leg& leg = L.legs[li];
    Window w;
    w.label = leg.label;
    w.phase = phase;
    w.move.kind = MoveKind::Translate;
    w.move.gate = state_gate(L.tube_core(leg), L.band);
    if (leg.gate != TapeGate::None) {
      const auto [lo, hi] = cylinder_interval(leg.gate_symbol, b);
      gate_tape(w.move.gate, leg.gate == TapeGate::CylinderX ? TapeX : TapeY, {lo, hi}, L);
    }
    w.move.displacement = {leg.displacement.x, leg.displacement.y, 0, 0};
    for (std::size_t s = 0; s < L.squares.size(); ++s)
      if (L.leg_owns(leg, s)) w.own_squares.push_back(s);
    return w;
  };

  auto station = [&](std::string label, std::size_t square) {
    Window w;
    w.label = std::move(label);
    w.phase = Phase::A;
    w.move.gate = state_gate(L.station_core(square), L.band);
    w.own_squares = {square};
    return w;
  };

  for (const Branch& br : L.branches) {
    const std::string name = branch_label(spec, br);
    const Transition& t = br.transition;
    for (auto li : br.ingest) phase_a.push_back(leg_window(li, Phase::A));

    if (t.write != br.read) {
      Window w = station("write(" + name + ")", br.parking);
      w.move.kind = MoveKind::Translate;
      gate_tape(w.move.gate, TapeX, hull, L);
      w.move.displacement = {0, 0, Rational((digit_value(t.write) - digit_value(br.read)) / B), 0};
      phase_a.push_back(std::move(w));
    }

    if (t.shift == Shift::Right) {
      Window w = station("saddle(" + name + ")", br.parking);
      w.move.kind = MoveKind::Saddle;
      w.move.axis = SaddleAxis::PopX;
      w.move.fixed_point = saddle_fixed_point(t.write, b);
      w.move.radix = B;
      gate_tape(w.move.gate, TapeX, hull, L);
      gate_tape(w.move.gate, TapeY, hull, L);
      phase_a.push_back(std::move(w));
    } else if (t.shift == Shift::Left) {
      for (auto pi : br.pipelines) {
        const Pipeline& p = L.pipelines[pi];
        for (auto li : p.stage) phase_a.push_back(leg_window(li, Phase::A));
        Window w = station("saddle(" + name + "|" + std::to_string(*p.popped) + ")", *p.staging);
        w.move.kind = MoveKind::Saddle;
        w.move.axis = SaddleAxis::PopY;
        w.move.fixed_point = saddle_fixed_point(*p.popped, b);
        w.move.radix = B;
        gate_tape(w.move.gate, TapeX, hull, L);
        gate_tape(w.move.gate, TapeY, hull, L);
        phase_a.push_back(std::move(w));
      }
    }

    for (auto pi : br.pipelines) {
      const Pipeline& p = L.pipelines[pi];
      std::string label = "contract(" + name;
      if (p.popped) label += "|" + std::to_string(*p.popped);
      Window w = station(label + ")", p.final_square);
      w.move.kind = MoveKind::Contract;
      w.move.center = L.squares[p.final_square].center;
      w.move.ratio = L.contraction;
      phase_a.push_back(std::move(w));
    }
  }

  for (const Pipeline& p : L.pipelines)
    for (auto li : p.deposit) phase_b.push_back(leg_window(li, Phase::B));

  sched.phase_a_size = phase_a.size();
  sched.windows = std::move(phase_a);
  sched.windows.insert(sched.windows.end(), std::make_move_iterator(phase_b.begin()),
                       std::make_move_iterator(phase_b.end()));

  const double slot = (kScheduleEnd - kScheduleBegin) / static_cast<double>(sched.windows.size());
  const double pad = slot / 20.0;
  for (std::size_t k = 0; k < sched.windows.size(); ++k) {
    sched.windows[k].start = kScheduleBegin + static_cast<double>(k) * slot + pad;
    sched.windows[k].end = kScheduleBegin + static_cast<double>(k + 1) * slot - pad;
  }
  return sched;
}

std::vector<std::string> validate_schedule(const Schedule& s, const Layout& L) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < s.windows.size(); ++k) {
    const auto& w = s.windows[k];
    if (!(w.start < w.end)) out.push_back("window " + w.label + " is empty");
    if (w.start < kScheduleBegin || w.end > kScheduleEnd)
      out.push_back("window " + w.label + " leaves [0.1, 0.9]");
    if (k > 0 && !(s.windows[k - 1].end < w.start))
      out.push_back("windows " + s.windows[k - 1].label + " and " + w.label + " overlap");
    if ((k < s.phase_a_size) != (w.phase == Phase::A))
      out.push_back("window " + w.label + " is out of phase order");
  }

  // Every branch must contribute its ingest legs, and every pipeline its
  // contraction and deposit legs, exactly once.
  std::multiset<std::string> labels;
  for (const auto& w : s.windows) labels.insert(w.label);
  for (const Leg& leg : L.legs)
    if (labels.count(leg.label) != 1) out.push_back("leg " + leg.label + " not scheduled once");
  std::size_t contracts = 0;
  for (const auto& w : s.windows)
    if (w.move.kind == MoveKind::Contract) ++contracts;
  if (contracts != L.pipelines.size()) out.push_back("contraction count differs from pipeline count");
  return out;
}

Config4 flow_period_exact(const Schedule& schedule, const Config4& p) {
  Config4 cur = p;
  for (const Window& w : schedule.windows) {
    switch (w.move.gate.classify(cur)) {
      case Gate::Membership::Outside:
        break;
      case Gate::Membership::Ring:
        throw AmbiguousMembership("point lies in the transition ring of window " + w.label);
      case Gate::Membership::Core: {
        Config4 next = w.move.apply(cur);
        if (w.move.gate.classify(next) != Gate::Membership::Core)
          throw AmbiguousMembership("window " + w.label + " carries the point out of its core");
        cur = std::move(next);
        break;
      }
    }
  }
  return cur;
}

}  // namespace tmflow
