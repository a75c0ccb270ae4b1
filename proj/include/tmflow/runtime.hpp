#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmflow/geometry.hpp"
#include "tmflow/integrator.hpp"
#include "tmflow/layout.hpp"
#include "tmflow/schedule.hpp"
#include "tmflow/suspension.hpp"
#include "tmflow/tm.hpp"

namespace tmflow {

/// Everything built from one machine: layout, schedule, the field on N and
/// the ambient field on R^11.
struct System {
  TMSpec spec;
  Layout layout;
  std::shared_ptr<const SuspensionField> field;
  HeightParams height;
  AmbientField ambient;

  static System build(const TMSpec& spec, const LayoutOptions& options = {});
};

enum class Mode { Intrinsic, Compactified, Ambient };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

enum class Outcome { BlewUp, PlateauHit, Bounded, NumericalFailure };
std::string to_string(Outcome o);

/// Row-oriented sampled trajectory with named columns.
struct Trajectory {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct RunOptions {
  double horizon = 10.0;
  /// Ambient blow-up threshold X_max on |x|.
  double threshold = 1e6;
  IntegratorConfig integrator;
  /// Minimum spacing of recorded samples; 0 records every accepted step.
  double sample_dt = 0.0;
  Trajectory* record = nullptr;
  /// Step budget for the symbolic blow-up prediction.
  std::size_t predict_budget = 10000;
};

/// h >= 1 - kHeightEventTol counts as entering the halting plateau.
inline constexpr double kHeightEventTol = 1e-9;
/// |w| >= 1 - kSphereEventTol counts as reaching the unit sphere.
inline constexpr double kSphereEventTol = 1e-9;
/// Clock half-width of the height plateau core: tau* = n - kClockCore.
inline constexpr double kClockCore = 0.05;

struct RunReport {
  Mode mode = Mode::Intrinsic;
  Outcome outcome = Outcome::Bounded;
  std::optional<double> t_detect;
  /// Event threshold: height level, ball radius or |x| bound by mode.
  double threshold = 0.0;
  double horizon = 0.0;
  /// Sup of |x| (ambient), |w| (compactified) or |G(p)| (intrinsic).
  double sup_norm = 0.0;
  double max_height = 0.0;
  std::optional<double> predicted_tau;
  std::optional<std::size_t> halting_steps;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
  double t_final = 0.0;
  std::string message;

  /// Estimate of the right end of the maximal existence interval.
  std::optional<double> t_max() const;
  nlohmann::json to_json() const;
};

struct BlowupPrediction {
  bool halts = false;
  std::size_t steps = 0;  // halting step count, or the exhausted budget
  double tau = std::numeric_limits<double>::infinity();
};

/// tau* = n - 0.05 where n is the exact halting step count; halts = false
/// when the budget is exhausted first.
BlowupPrediction predict_blowup_time(const TMSpec& spec, const Tape& tape, std::size_t budget);

ManifoldPoint initial_point(const System& sys, const Configuration& c0);
Vec11 initial_ambient_point(const System& sys, const Configuration& c0);

RunReport integrate_intrinsic(const System& sys, const Configuration& c0, const RunOptions& opt);
RunReport integrate_compactified(const System& sys, const Configuration& c0,
                                 const RunOptions& opt);
/// Integrates x' = F(x) from x0; BlewUp once |x| >= opt.threshold.
RunReport integrate_ambient(const AmbientField& field, const Vec11& x0, const RunOptions& opt);
/// Convenience: ambient run from the encoded start configuration, with the
/// symbolic prediction attached.
RunReport integrate_ambient(const System& sys, const Configuration& c0, const RunOptions& opt);

RunReport run_mode(const System& sys, Mode mode, const Configuration& c0, const RunOptions& opt);

}  // namespace tmflow
