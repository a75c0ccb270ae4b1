#pragma once

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tmflow/runtime.hpp"

namespace tmflow::checks {

using Rng = std::mt19937_64;

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failure_count = 0;
  /// First few failure messages.
  std::vector<std::string> failures;
  /// Worst observed values, keyed by quantity.
  std::map<std::string, double> metrics;

  bool passed() const { return failure_count == 0; }
  void fail(std::string message);
  void record_max(const std::string& key, double value);
  std::string summary() const;
};

/// Canonical tape with up to `max_len` cells on each side of the head.
Tape random_tape(Rng& rng, int alphabet_size, std::size_t max_len = 6);

/// Non-halting configurations reached from random input tapes after a random
/// number (0..max_depth) of steps.
std::vector<Configuration> sample_reachable(const TMSpec& spec, std::size_t count, Rng& rng,
                                            std::size_t max_depth = 20);

/// Angle-wise distance on the circle.
double circle_distance(double a, double b);

/// End point of one clock revolution of dp/ds = V(p, s) from p at s = 0.
Vec4 integrate_period(const SuspensionField& field, const Vec4& p, const IntegratorConfig& cfg);

/// Layout validator and schedule structure.
SuiteResult layout_suite(const System& sys);

/// Exact period map against the symbolic step on each configuration, plus
/// iterated periods from each configuration's input tape.
SuiteResult conjugacy_suite(const System& sys, const std::vector<Configuration>& configs,
                            std::size_t iterate_steps = 20);

/// One-period numeric integration against the exact period map.
SuiteResult flow_agreement_suite(const System& sys, const std::vector<Configuration>& configs,
                                 double tolerance, const IntegratorConfig& cfg = {});

/// V is exactly zero on every square a window does not own.
SuiteResult support_suite(const System& sys, std::size_t samples_per_square, Rng& rng);

/// Random manifold point; roughly half are drawn near the halting region so
/// that h takes values across [0, 1].
ManifoldPoint random_manifold_point(const HeightParams& hp, Rng& rng);

struct GeometryTolerances {
  double embed_norm = 1e-12;
  double ball_identity = 1e-12;
  double poincare_roundtrip = 1e-12;
  double jvp_relative = 1e-5;
  double retraction = 1e-9;
  double pushforward_relative = 1e-12;
};

/// Norm shell, ball identity, compactification round trip and retraction
/// round trip on `samples` points; tangent-map and pushforward checks on
/// `derivative_samples` of them.
SuiteResult geometry_suite(const System& sys, std::size_t samples, std::size_t derivative_samples,
                           Rng& rng, const GeometryTolerances& tol = {});

/// Compares F(G(p(tau))) with a central difference of G along the intrinsic
/// trajectory from c0, at `samples` times before the first event.
SuiteResult trajectory_pushforward_suite(const System& sys, const Configuration& c0,
                                         std::size_t samples, double tolerance);

}  // namespace tmflow::checks
