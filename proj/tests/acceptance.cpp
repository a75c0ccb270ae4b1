// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "tmflow/checks.hpp"
#include "tmflow/runtime.hpp"

using namespace tmflow;

namespace {

using Clock = std::chrono::steady_clock;

TMSpec machine(const std::string& name) { return load_tm_file(std::string(TMFLOW_DATA_DIR "/") + name); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& why) {
    if (!cond) {
      ok = false;
      detail << " [" << why << "]";
    }
  }
};

int failures = 0;

void report(int id, const char* title, Line& line) {
  std::printf("%s %d %s:%s\n", line.ok ? "PASS" : "FAIL", id, title, line.detail.str().c_str());
  std::fflush(stdout);
  failures += !line.ok;
}

void absorb(Line& line, const checks::SuiteResult& r, const std::string& who) {
  if (r.passed()) return;
  line.require(false, who + ": " + std::to_string(r.failure_count) + " failures");
  for (const auto& f : r.failures) std::printf("    %s\n", f.c_str());
}

const char* kCore[] = {"halt3.tm", "loop.tm", "bb-small.tm"};
const char* kAll[] = {"halt3.tm", "loop.tm", "one-step.tm", "bb-small.tm"};

void criterion1() {
  Line line;
  checks::Rng rng(101);
  const auto t0 = Clock::now();
  std::size_t cases = 0;
  for (const char* name : kCore) {
    const System sys = System::build(machine(name));
    const auto configs = checks::sample_reachable(sys.spec, 100, rng);
    const auto r = checks::conjugacy_suite(sys, configs);
    cases += r.cases;
    absorb(line, r, name);
  }
  const double dt = seconds_since(t0);
  line.detail << " cases=" << cases << " time=" << dt << "s";
  line.require(dt <= 10.0, "over 10 s");
  report(1, "exact period map matches the step", line);
}

void criterion2() {
  Line line;
  checks::Rng rng(202);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const char* name : kCore) {
    const System sys = System::build(machine(name));
    const auto configs = checks::sample_reachable(sys.spec, 50, rng);
    const auto r = checks::flow_agreement_suite(sys, configs, 1e-6);
    for (const auto& [k, v] : r.metrics) worst = std::max(worst, v);
    absorb(line, r, name);
  }
  const double dt = seconds_since(t0);
  line.detail << " max_error=" << worst << " time=" << dt << "s";
  line.require(dt <= 120.0, "over 2 min");
  report(2, "numeric period within 1e-6 of exact", line);
}

void criterion3() {
  Line line;
  for (const char* name : {"halt3.tm", "one-step.tm"}) {
    const TMSpec spec = machine(name);
    const System sys = System::build(spec);
    const auto c0 = start_config(spec);
    const auto pred = predict_blowup_time(spec, c0.tape, 10000);
    const double n = static_cast<double>(pred.steps);
    RunOptions o;
    o.horizon = n + 5;
    for (Mode m : {Mode::Intrinsic, Mode::Compactified}) {
      const RunReport r = run_mode(sys, m, c0, o);
      const bool hit = r.outcome == Outcome::PlateauHit && r.t_detect && *r.t_detect >= n - 0.07 &&
                       *r.t_detect <= n - 0.05;
      line.require(hit, std::string(name) + " " + to_string(m));
      if (r.t_detect) line.detail << " " << name << "/" << to_string(m) << "=" << *r.t_detect;
    }
    const RunReport am = integrate_ambient(sys, c0, o);
    line.require(am.outcome == Outcome::BlewUp && am.t_detect && *am.t_detect <= n - 0.05 &&
                     am.sup_norm >= 1e6,
                 std::string(name) + " ambient");
    if (am.t_detect) line.detail << " " << name << "/ambient=" << *am.t_detect;
  }
  const TMSpec loop = machine("loop.tm");
  const System sys = System::build(loop);
  RunOptions o;
  o.horizon = 100;
  for (Mode m : {Mode::Intrinsic, Mode::Compactified, Mode::Ambient}) {
    const RunReport r = run_mode(sys, m, start_config(loop), o);
    line.require(r.outcome == Outcome::Bounded && r.t_final >= 100.0, std::string("loop ") + to_string(m));
  }
  report(3, "halting detected in the bracket, loop bounded", line);
}

void criterion4() {
  Line line;
  const TMSpec spec = machine("loop.tm");
  const System sys = System::build(spec);
  RunOptions o;
  o.horizon = 100;
  const RunReport r = integrate_ambient(sys, start_config(spec), o);
  line.detail << " sup=" << r.sup_norm;
  line.require(r.outcome == Outcome::Bounded, "not bounded");
  line.require(r.sup_norm <= std::sqrt(5.0) + 1e-3, "sup above sqrt(5)+1e-3");
  report(4, "non-halting ambient orbit stays bounded", line);
}

void criterion5() {
  Line line;
  checks::Rng rng(505);
  for (const char* name : kCore) {
    const System sys = System::build(machine(name));
    checks::GeometryTolerances tol;
    const auto r = checks::geometry_suite(sys, 100000, 0, rng, tol);
    for (const auto& [k, v] : r.metrics) line.detail << " " << name << "/" << k << "=" << v;
    absorb(line, r, name);
  }
  report(5, "geometry identities at 1e-12 on 1e5 points", line);
}

void criterion6() {
  Line line;
  checks::Rng rng(606);
  for (const char* name : kAll) {
    const System sys = System::build(machine(name));
    absorb(line, checks::layout_suite(sys), std::string(name) + " validator");
    absorb(line, checks::support_suite(sys, 100, rng), std::string(name) + " support");
  }
  report(6, "field supported only on owned squares, layouts valid", line);
}

void criterion7() {
  Line line;
  const TMSpec spec = machine("halt3.tm");
  const System sys = System::build(spec);
  std::vector<double> taus;
  for (double X : {1e3, 1e4, 1e6}) {
    RunOptions o;
    o.threshold = X;
    const RunReport r = integrate_ambient(sys, start_config(spec), o);
    const bool ok = r.outcome == Outcome::BlewUp && r.t_detect;
    line.require(ok, "no blow-up at X=" + std::to_string(X));
    taus.push_back(ok ? *r.t_detect : NAN);
    line.detail << " tau(" << X << ")=" << taus.back();
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    line.require(taus[i] >= 2.88 && taus[i] <= 2.95, "outside [2.88, 2.95]");
    if (i) line.require(taus[i - 1] <= taus[i], "not monotone");
  }
  report(7, "blow-up time monotone in the threshold", line);
}

void criterion8() {
  Line line;
  checks::Rng rng(808);
  for (const char* name : kCore) {
    const System sys = System::build(machine(name));
    checks::GeometryTolerances tol;
    const auto g = checks::geometry_suite(sys, 1000, 1000, rng, tol);
    absorb(line, g, std::string(name) + " tangent map");
    if (g.metrics.count("jvp_relative_error")) line.detail << " " << name << "/jvp=" << g.metrics.at("jvp_relative_error");
    const auto t = checks::trajectory_pushforward_suite(sys, start_config(sys.spec), 200, 1e-6);
    absorb(line, t, std::string(name) + " trajectory");
    for (const auto& [k, v] : t.metrics) line.detail << " " << name << "/" << k << "=" << v;
  }
  report(8, "tangent map and pushforward match finite differences", line);
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
  } catch (const std::exception& e) {
    std::printf("FAIL aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
