#include "tmflow/layout.hpp"

#include <algorithm>
#include <map>

namespace tmflow {

Rect Rect::square(const Point2& c, const Rational& half) {
  return {c.x - half, c.y - half, c.x + half, c.y + half};
}

Rect Rect::inflated(const Rational& d) const { return {x0 - d, y0 - d, x1 + d, y1 + d}; }

Rect Rect::translated(const Point2& v) const {
  return {x0 + v.x, y0 + v.y, x1 + v.x, y1 + v.y};
}

Rect Rect::hull(const Rect& o) const {
  return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
}

bool Rect::contains(const Point2& p) const {
  return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
}

bool Rect::contains(const Rect& r) const {
  return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
}

bool Rect::strictly_contains(const Rect& r) const {
  return r.x0 > x0 && r.x1 < x1 && r.y0 > y0 && r.y1 < y1;
}

bool Rect::intersects(const Rect& r) const {
  return x0 <= r.x1 && r.x0 <= x1 && y0 <= r.y1 && r.y0 <= y1;
}

Rational separation(const Rect& a, const Rect& b) {
  Rational gx = std::max(Rational(a.x0 - b.x1), Rational(b.x0 - a.x1));
  Rational gy = std::max(Rational(a.y0 - b.y1), Rational(b.y0 - a.y1));
  return std::max(gx, gy);
}

namespace {

// The open set {plateau > 0} of a support rectangle meets a closed set.
bool support_meets(const Rect& support, const Rect& closed) {
  return support.x0 < closed.x1 && closed.x0 < support.x1 && support.y0 < closed.y1 &&
         closed.y0 < support.y1;
}

bool inside_fundamental_domain(const Rect& r) {
  return r.x0 > 0 && r.y0 > 0 && r.x1 < 1 && r.y1 < 1;
}

constexpr std::size_t kMaxStates = 16;
constexpr int kMaxAlphabet = 4;

std::string branch_name(const TMSpec& spec, std::size_t q, int s) {
  return spec.states[q] + "," + std::to_string(s);
}

}  // namespace

Rect Layout::tube_core(const Leg& leg) const {
  return leg.moving.hull(leg.moving.translated(leg.displacement)).inflated(core_margin);
}

Rect Layout::tube_support(const Leg& leg) const { return tube_core(leg).inflated(band); }

Rect Layout::station_core(std::size_t square) const {
  return squares.at(square).rect().inflated(core_margin);
}

Rect Layout::station_support(std::size_t square) const {
  return station_core(square).inflated(band);
}

Rect Layout::halt_core() const {
  return squares.at(state_square.at(halt_state)).rect().inflated(half_side / 2);
}

Rect Layout::halt_support() const {
  return squares.at(state_square.at(halt_state)).rect().inflated(half_side);
}

bool Layout::leg_owns(const Leg& leg, std::size_t square) const {
  const Pipeline& pipe = pipelines.at(leg.pipeline);
  const Branch& br = branches.at(pipe.branch);
  const Square& sq = squares.at(square);
  switch (leg.kind) {
    case LegKind::Ingest: {
      std::size_t from = state_square.at(br.state);
      return square == from || square == br.parking || sq.parent == from;
    }
    case LegKind::Stage:
      return square == br.parking || (pipe.staging && square == *pipe.staging);
    case LegKind::Deposit:
      return square == pipe.final_square || square == state_square.at(pipe.target_state) ||
             square == pipe.subcell;
  }
  return false;
}

Layout build_layout(const TMSpec& spec, const LayoutOptions& options) {
  if (spec.num_states() > kMaxStates)
    throw RecipeOverflow("default layout supports at most " + std::to_string(kMaxStates) +
                         " states, machine has " + std::to_string(spec.num_states()));
  if (spec.alphabet_size > kMaxAlphabet)
    throw RecipeOverflow("default layout supports alphabet size at most " +
                         std::to_string(kMaxAlphabet));

  Layout L;
  const int b = spec.alphabet_size;
  L.alphabet_size = b;
  L.halt_state = spec.halt;
  L.rows = {make_rational(1, 8), make_rational(3, 8), make_rational(5, 8)};
  L.lanes = {make_rational(1, 4), make_rational(1, 2), make_rational(3, 4)};

  // Branches and pipelines first: they determine the column count and N_in.
  for (std::size_t q = 0; q < spec.num_states(); ++q) {
    if (spec.is_halt(q)) continue;
    for (int s = 0; s < b; ++s) {
      Branch br;
      br.state = q;
      br.read = s;
      br.transition = spec.delta(q, s);
      L.branches.push_back(br);
    }
  }
  for (std::size_t bi = 0; bi < L.branches.size(); ++bi) {
    auto& br = L.branches[bi];
    if (br.transition.shift == Shift::Left) {
      for (int tau = 0; tau < b; ++tau) {
        Pipeline p;
        p.branch = bi;
        p.popped = tau;
        p.target_state = br.transition.next;
        br.pipelines.push_back(L.pipelines.size());
        L.pipelines.push_back(p);
      }
    } else {
      Pipeline p;
      p.branch = bi;
      p.target_state = br.transition.next;
      br.pipelines.push_back(L.pipelines.size());
      L.pipelines.push_back(p);
    }
  }

  std::vector<std::size_t> incoming(spec.num_states(), 0);
  for (const auto& p : L.pipelines) ++incoming[p.target_state];
  const std::size_t n_in = std::max<std::size_t>(1, *std::max_element(incoming.begin(), incoming.end()));

  std::size_t n_staging = 0;
  for (const auto& p : L.pipelines)
    if (p.popped) ++n_staging;
  const std::size_t n_columns = spec.num_states() + L.branches.size() + n_staging;
  const Rational pitch = make_rational(1, static_cast<long>(n_columns + 1));

  Rational r = std::min(Rational(pitch / 5), make_rational(1, 64));
  if (options.half_side) r = *options.half_side;
  L.half_side = r;
  L.contraction = make_rational(1, 2 * static_cast<long>(n_in));
  L.core_margin = r / (8 * static_cast<long>(n_in));
  L.band = r / (4 * static_cast<long>(n_in));
  L.tape_core_margin = cylinder_gap(b) / 8;
  L.tape_band = cylinder_gap(b) / 8;

  std::size_t column = 0;
  auto next_x = [&]() -> Rational { return pitch * static_cast<long>(++column); };

  for (std::size_t q = 0; q < spec.num_states(); ++q) {
    L.state_square.push_back(L.squares.size());
    L.squares.push_back({"B[" + spec.states[q] + "]", SquareKind::State, {next_x(), L.rows[0]}, r, {}});
  }
  for (auto& br : L.branches) {
    br.parking = L.squares.size();
    L.squares.push_back({"P[" + branch_name(spec, br.state, br.read) + "]", SquareKind::Parking,
                         {next_x(), L.rows[1]}, r, {}});
  }
  for (auto& p : L.pipelines) {
    const auto& br = L.branches[p.branch];
    if (p.popped) {
      p.staging = L.squares.size();
      L.squares.push_back({"P2[" + branch_name(spec, br.state, br.read) + "|" +
                               std::to_string(*p.popped) + "]",
                           SquareKind::Staging, {next_x(), L.rows[2]}, r, {}});
      p.final_square = *p.staging;
    } else {
      p.final_square = br.parking;
    }
  }

  // Private sub-cells: the k-th pipeline into a state gets the k-th slot of
  // a row of N_in slots across the state square.
  std::vector<std::size_t> used(spec.num_states(), 0);
  const Rational sub_half = L.contraction * r;
  for (std::size_t pi = 0; pi < L.pipelines.size(); ++pi) {
    auto& p = L.pipelines[pi];
    const auto target = L.state_square[p.target_state];
    const auto k = static_cast<long>(used[p.target_state]++);
    const Square& B = L.squares[target];
    Point2 c{B.center.x - r + r * (2 * k + 1) / static_cast<long>(n_in), B.center.y};
    p.subcell = L.squares.size();
    L.squares.push_back({"sub[" + spec.states[p.target_state] + "#" + std::to_string(k) + "]",
                         SquareKind::SubCell, c, sub_half, target});
  }

  auto add_leg = [&](std::string label, LegKind kind, std::size_t pipe, const Rect& moving,
                     Point2 disp, TapeGate gate, int symbol) {
    L.legs.push_back({std::move(label), kind, pipe, moving, std::move(disp), gate, symbol});
    return L.legs.size() - 1;
  };
  const Rational zero = 0;

  for (auto& br : L.branches) {
    const std::string name = branch_name(spec, br.state, br.read);
    const Square& from = L.squares[L.state_square[br.state]];
    const Square& park = L.squares[br.parking];
    Rect m = from.rect();
    const std::array<Point2, 3> route{Point2{zero, L.lanes[0] - L.rows[0]},
                                      Point2{park.center.x - from.center.x, zero},
                                      Point2{zero, L.rows[1] - L.lanes[0]}};
    for (int i = 0; i < 3; ++i) {
      br.ingest[i] = add_leg("ingest(" + name + ")#" + std::to_string(i + 1), LegKind::Ingest,
                             br.pipelines.front(), m, route[i], TapeGate::CylinderX, br.read);
      m = m.translated(route[i]);
    }
  }

  for (std::size_t pi = 0; pi < L.pipelines.size(); ++pi) {
    auto& p = L.pipelines[pi];
    const auto& br = L.branches[p.branch];
    std::string name = branch_name(spec, br.state, br.read);
    if (p.popped) name += "|" + std::to_string(*p.popped);
    if (p.staging) {
      const Square& park = L.squares[br.parking];
      const Square& stage = L.squares[*p.staging];
      Rect m = park.rect();
      const std::array<Point2, 3> route{Point2{zero, L.lanes[1] - L.rows[1]},
                                        Point2{stage.center.x - park.center.x, zero},
                                        Point2{zero, L.rows[2] - L.lanes[1]}};
      for (int i = 0; i < 3; ++i) {
        p.stage[i] = add_leg("stage(" + name + ")#" + std::to_string(i + 1), LegKind::Stage, pi,
                             m, route[i], TapeGate::CylinderY, *p.popped);
        m = m.translated(route[i]);
      }
    }
    const Square& fin = L.squares[p.final_square];
    const Square& sub = L.squares[p.subcell];
    Rect m = Rect::square(fin.center, sub_half);
    // Parking squares drop to the lower lane; staging squares climb to the top lane.
    const Rational lane = p.staging ? L.lanes[2] : L.lanes[0];
    const std::array<Point2, 3> route{Point2{zero, lane - fin.center.y},
                                      Point2{sub.center.x - fin.center.x, zero},
                                      Point2{zero, sub.center.y - lane}};
    for (int i = 0; i < 3; ++i) {
      p.deposit[i] = add_leg("deposit(" + name + ")#" + std::to_string(i + 1), LegKind::Deposit,
                             pi, m, route[i], TapeGate::None, 0);
      m = m.translated(route[i]);
    }
  }
  return L;
}

std::vector<std::string> validate_layout(const Layout& L) {
  std::vector<std::string> out;
  const Rational tube_width = L.core_margin + L.band;
  if (L.half_side <= 0) out.push_back("square half-side must be positive");

  const auto n = L.squares.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Square& a = L.squares[i];
    if (!inside_fundamental_domain(L.station_support(i)))
      out.push_back("square " + a.name + " plateau support crosses the torus seam");
    if (a.parent && !L.squares[*a.parent].rect().strictly_contains(a.rect()))
      out.push_back("sub-cell " + a.name + " is not strictly inside " + L.squares[*a.parent].name);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Square& b = L.squares[j];
      if (a.parent == j || b.parent == i) continue;
      if (separation(a.rect(), b.rect()) < tube_width)
        out.push_back("squares " + a.name + " and " + b.name +
                      " overlap or are closer than one tube width");
    }
  }

  for (const Leg& leg : L.legs) {
    const Rect support = L.tube_support(leg);
    if (!inside_fundamental_domain(support))
      out.push_back("leg " + leg.label + " tube crosses the torus seam");
    for (std::size_t s = 0; s < n; ++s) {
      if (L.leg_owns(leg, s)) continue;
      if (support_meets(support, L.squares[s].rect()))
        out.push_back("leg " + leg.label + " tube meets foreign square " + L.squares[s].name);
    }
  }

  // Deposits must land exactly on the private sub-cell after contraction.
  for (const Pipeline& p : L.pipelines) {
    Point2 c = L.squares[p.final_square].center;
    for (auto li : p.deposit) {
      c.x += L.legs[li].displacement.x;
      c.y += L.legs[li].displacement.y;
    }
    const Square& sub = L.squares[p.subcell];
    const Rect image = Rect::square(c, L.contraction * L.squares[p.final_square].half);
    if (!(c == sub.center) || !L.squares[L.state_square[p.target_state]].rect().strictly_contains(image))
      out.push_back("deposit image of " + L.legs[p.deposit[2]].label +
                    " does not fall strictly inside its target square");
  }

  const std::size_t halt_sq = L.state_square[L.halt_state];
  const Rect hs = L.halt_support();
  if (!inside_fundamental_domain(hs)) out.push_back("halting plateau crosses the torus seam");
  for (std::size_t s = 0; s < n; ++s) {
    if (s == halt_sq || L.squares[s].parent == halt_sq) continue;
    if (support_meets(hs, L.squares[s].rect()))
      out.push_back("halting plateau meets foreign square " + L.squares[s].name);
  }
  for (const Leg& leg : L.legs) {
    // Descents into HALT necessarily cross its plateau; the clock factor of
    // the height vanishes during every window.
    if (leg.kind == LegKind::Deposit && L.pipelines[leg.pipeline].target_state == L.halt_state)
      continue;
    const Rect t = L.tube_support(leg);
    if (hs.x0 < t.x1 && t.x0 < hs.x1 && hs.y0 < t.y1 && t.y0 < hs.y1)
      out.push_back("halting plateau meets tube of leg " + leg.label);
  }

  const int b = L.alphabet_size;
  if (hull_min(b) - L.tape_core_margin - L.tape_band <= 0 ||
      hull_max(b) + L.tape_core_margin + L.tape_band >= 1)
    out.push_back("tape hull plateau crosses the torus seam");
  if (2 * (L.tape_core_margin + L.tape_band) >= cylinder_gap(b))
    out.push_back("tape cylinder plateaus overlap across a gap");
  return out;
}

Config4 encode_config(const TMSpec& spec, const Configuration& c, const Layout& layout) {
  return {layout.squares.at(layout.state_square.at(c.state)).center,
          encode_tape(c.tape, spec.alphabet_size)};
}

std::optional<std::size_t> classify_state(const Layout& layout, const Point2& p) {
  for (std::size_t q = 0; q < layout.state_square.size(); ++q)
    if (layout.squares[layout.state_square[q]].rect().contains(p)) return q;
  return std::nullopt;
}

}  // namespace tmflow
