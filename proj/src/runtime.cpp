#include "tmflow/runtime.hpp"

#include <cmath>
#include <stdexcept>

namespace tmflow {

System System::build(const TMSpec& spec, const LayoutOptions& options) {
  Layout layout = build_layout(spec, options);
  Schedule schedule = build_schedule(spec, layout);
  auto field = std::make_shared<const SuspensionField>(layout, std::move(schedule));
  HeightParams hp = HeightParams::from_layout(layout);
  return System{spec, std::move(layout), field, hp, AmbientField(field, hp)};
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Intrinsic: return "intrinsic";
    case Mode::Compactified: return "compactified";
    case Mode::Ambient: return "ambient";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "intrinsic") return Mode::Intrinsic;
  if (s == "compactified") return Mode::Compactified;
  if (s == "ambient") return Mode::Ambient;
  throw std::invalid_argument("unknown mode '" + s + "' (intrinsic|compactified|ambient)");
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::BlewUp: return "BlewUp";
    case Outcome::PlateauHit: return "PlateauHit";
    case Outcome::Bounded: return "Bounded";
    case Outcome::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

std::optional<double> RunReport::t_max() const {
  if (predicted_tau) return predicted_tau;
  if (outcome == Outcome::BlewUp || outcome == Outcome::PlateauHit) return t_detect;
  return std::nullopt;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json out;
  out["mode"] = to_string(mode);
  nlohmann::json oc;
  oc["kind"] = to_string(outcome);
  if (t_detect) oc["t_detect"] = *t_detect;
  oc["threshold"] = threshold;
  out["outcome"] = oc;
  out["horizon"] = horizon;
  out["t_final"] = t_final;
  out["sup_norm"] = sup_norm;
  out["max_height"] = max_height;
  out["predicted_tau"] = predicted_tau ? nlohmann::json(*predicted_tau) : nlohmann::json(nullptr);
  out["halting_steps"] = halting_steps ? nlohmann::json(*halting_steps) : nlohmann::json(nullptr);
  out["t_min"] = "-inf";
  if (auto t = t_max()) out["t_max"] = *t;
  else out["t_max"] = "inf";
  out["stats"] = {{"accepted", accepted}, {"rejected", rejected}, {"evaluations", evaluations}};
  if (!message.empty()) out["message"] = message;
  return out;
}

BlowupPrediction predict_blowup_time(const TMSpec& spec, const Tape& tape, std::size_t budget) {
  auto outcome = run(spec, start_config(spec, tape), budget);
  BlowupPrediction p;
  if (const auto* h = std::get_if<Halted>(&outcome)) {
    p.halts = true;
    p.steps = h->steps;
    p.tau = static_cast<double>(h->steps) - kClockCore;
  } else {
    p.steps = budget;
  }
  return p;
}

ManifoldPoint initial_point(const System& sys, const Configuration& c0) {
  const Config4 e = encode_config(sys.spec, c0, sys.layout);
  return ManifoldPoint{{to_double(e.state.x), to_double(e.state.y), to_double(e.tape.x),
                        to_double(e.tape.y), 0.0}};
}

Vec11 initial_ambient_point(const System& sys, const Configuration& c0) {
  return forward_map(initial_point(sys, c0), sys.height);
}

namespace {

std::vector<std::string> ambient_columns(const char* prefix = "x") {
  std::vector<std::string> c{"tau"};
  for (int i = 1; i <= 11; ++i) c.push_back(prefix + std::to_string(i));
  c.push_back("h");
  c.push_back("norm");
  return c;
}

// Appends samples no closer than sample_dt, always keeping the final one.
class Recorder {
 public:
  Recorder(Trajectory* out, double dt, std::vector<std::string> columns) : out_(out), dt_(dt) {
    if (out_) {
      out_->columns = std::move(columns);
      out_->rows.clear();
    }
  }

  void offer(double t, std::vector<double> row, bool force = false) {
    if (!out_) return;
    if (!force && !out_->rows.empty() && t - last_ < dt_) {
      pending_ = std::move(row);
      return;
    }
    out_->rows.push_back(std::move(row));
    last_ = t;
    pending_.clear();
  }

  void finish() {
    if (out_ && !pending_.empty()) out_->rows.push_back(std::move(pending_));
  }

 private:
  Trajectory* out_;
  double dt_;
  double last_ = 0.0;
  std::vector<double> pending_;
};

template <std::size_t N>
void fill_stats(RunReport& r, const IntegrationResult<N>& res) {
  r.accepted = res.accepted;
  r.rejected = res.rejected;
  r.evaluations = res.evaluations;
  r.t_final = res.t;
  switch (res.reason) {
    case StopReason::Horizon: r.outcome = Outcome::Bounded; break;
    case StopReason::Event: r.t_detect = res.t; break;
    case StopReason::StepSizeUnderflow:
      r.outcome = Outcome::NumericalFailure;
      r.message = "step size underflow at tau = " + std::to_string(res.t);
      break;
    case StopReason::NonFinite:
      r.outcome = Outcome::NumericalFailure;
      r.message = "non-finite state at tau = " + std::to_string(res.t);
      break;
    case StopReason::StepLimit:
      r.outcome = Outcome::NumericalFailure;
      r.message = "step limit reached at tau = " + std::to_string(res.t);
      break;
  }
}

void attach_prediction(RunReport& r, const System& sys, const Configuration& c0,
                       const RunOptions& opt) {
  if (c0.state != sys.spec.start) return;
  auto p = predict_blowup_time(sys.spec, c0.tape, opt.predict_budget);
  if (p.halts) {
    r.predicted_tau = p.tau;
    r.halting_steps = p.steps;
  }
}

}  // namespace

RunReport integrate_intrinsic(const System& sys, const Configuration& c0, const RunOptions& opt) {
  RunReport rep;
  rep.mode = Mode::Intrinsic;
  rep.horizon = opt.horizon;
  rep.threshold = 1.0 - kHeightEventTol;
  attach_prediction(rep, sys, c0, opt);

  const SuspensionField& field = *sys.field;
  const HeightParams& hp = sys.height;
  const ManifoldPoint p0 = initial_point(sys, c0);
  Recorder rec(opt.record, opt.sample_dt, {"tau", "theta1", "theta2", "theta3", "theta4", "s", "h"});

  auto rhs = [&](double, const std::array<double, 5>& y) {
    const Vec4 v = field.eval({y[0], y[1], y[2], y[3]}, y[4]);
    return std::array<double, 5>{v[0], v[1], v[2], v[3], 1.0};
  };
  auto event = [&](double, const std::array<double, 5>& y) {
    return height_value(ManifoldPoint{y}, hp) - rep.threshold;
  };
  auto observe = [&](double t, const std::array<double, 5>& y) {
    const ManifoldPoint p = ManifoldPoint{y}.reduced();
    const auto h = height(p, hp);
    rep.max_height = std::max(rep.max_height, h.value);
    const double gap = h.complement * (1.0 + h.value);
    const double g = gap > 0.0 ? std::sqrt((5.0 + h.value * h.value) / gap)
                               : std::numeric_limits<double>::infinity();
    rep.sup_norm = std::max(rep.sup_norm, g);
    rec.offer(t, {t, p.angles[0], p.angles[1], p.angles[2], p.angles[3], p.angles[4], h.value});
  };
  auto res = integrate<5>(rhs, 0.0, p0.angles, opt.horizon, opt.integrator, event, observe);
  rec.finish();
  fill_stats(rep, res);
  if (res.reason == StopReason::Event) rep.outcome = Outcome::PlateauHit;
  return rep;
}

RunReport integrate_compactified(const System& sys, const Configuration& c0,
                                 const RunOptions& opt) {
  RunReport rep;
  rep.mode = Mode::Compactified;
  rep.horizon = opt.horizon;
  rep.threshold = 1.0 - kSphereEventTol;
  attach_prediction(rep, sys, c0, opt);

  const AmbientField& F = sys.ambient;
  const HeightParams& hp = sys.height;
  const Vec11 w0 = ball_map(initial_point(sys, c0), hp);
  Recorder rec(opt.record, opt.sample_dt, ambient_columns("w"));

  auto rhs = [&](double, const Vec11& w) { return F.eval_ball(w); };
  auto event = [&](double, const Vec11& w) { return norm(w) - rep.threshold; };
  auto observe = [&](double t, const Vec11& w) {
    const double n = norm(w);
    rep.sup_norm = std::max(rep.sup_norm, n);
    double h = 0.0;
    try {
      h = height_value(retract_ball(w, hp).point, hp);
    } catch (const OutsideTube&) {
    }
    rep.max_height = std::max(rep.max_height, h);
    std::vector<double> row{t};
    row.insert(row.end(), w.begin(), w.end());
    row.push_back(h);
    row.push_back(n);
    rec.offer(t, std::move(row));
  };
  auto res = integrate<11>(rhs, 0.0, w0, opt.horizon, opt.integrator, event, observe);
  rec.finish();
  fill_stats(rep, res);
  // The unit sphere is the image of the halting plateau.
  if (res.reason == StopReason::Event) rep.outcome = Outcome::PlateauHit;
  return rep;
}

RunReport integrate_ambient(const AmbientField& F, const Vec11& x0, const RunOptions& opt) {
  if (!(opt.threshold > norm(x0)))
    throw std::invalid_argument("blow-up threshold must exceed |x0|");
  RunReport rep;
  rep.mode = Mode::Ambient;
  rep.horizon = opt.horizon;
  rep.threshold = opt.threshold;
  const HeightParams& hp = F.height_params();
  Recorder rec(opt.record, opt.sample_dt, ambient_columns());

  auto rhs = [&](double, const Vec11& x) { return F.eval(x); };
  auto event = [&](double, const Vec11& x) { return norm(x) - opt.threshold; };
  auto observe = [&](double t, const Vec11& x) {
    const double n = norm(x);
    rep.sup_norm = std::max(rep.sup_norm, n);
    double h = 0.0;
    try {
      h = height_value(retract(x, hp).point, hp);
    } catch (const OutsideTube&) {
    }
    rep.max_height = std::max(rep.max_height, h);
    std::vector<double> row{t};
    row.insert(row.end(), x.begin(), x.end());
    row.push_back(h);
    row.push_back(n);
    rec.offer(t, std::move(row));
  };
  auto res = integrate<11>(rhs, 0.0, x0, opt.horizon, opt.integrator, event, observe);
  rec.finish();
  fill_stats(rep, res);
  if (res.reason == StopReason::Event) rep.outcome = Outcome::BlewUp;
  return rep;
}

RunReport integrate_ambient(const System& sys, const Configuration& c0, const RunOptions& opt) {
  RunReport rep = integrate_ambient(sys.ambient, initial_ambient_point(sys, c0), opt);
  attach_prediction(rep, sys, c0, opt);
  return rep;
}

RunReport run_mode(const System& sys, Mode mode, const Configuration& c0, const RunOptions& opt) {
  switch (mode) {
    case Mode::Intrinsic: return integrate_intrinsic(sys, c0, opt);
    case Mode::Compactified: return integrate_compactified(sys, c0, opt);
    case Mode::Ambient: return integrate_ambient(sys, c0, opt);
  }
  throw std::invalid_argument("unknown mode");
}

}  // namespace tmflow
