#include "tmflow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tmflow/checks.hpp"
#include "tmflow/runtime.hpp"
#include "tmflow/trajectory_io.hpp"

namespace tmflow::cli {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string machine;
  std::vector<std::string> tapes;
  std::string config;
  std::size_t jobs = 1;
};

struct RunArgs {
  std::string mode = "intrinsic";
  double horizon = 10.0;
  double threshold = 1e6;
  double tol_abs = 1e-10;
  double tol_rel = 1e-10;
  double max_step = 1e-3;
  std::string method = "dp45";
  double fixed_step = 1e-4;
  double sample_dt = 0.0;
  std::string export_path;
  std::string format = "csv";
  std::string report_path;
  std::size_t budget = 10000;
};

struct CheckArgs {
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  std::string half_side;
};

void add_common(CLI::App* app, Common& c, bool many_tapes) {
  app->add_option("--machine", c.machine, "Turing machine file")->required();
  app->add_option("--tape", c.tapes,
                  many_tapes ? "input tape literal such as \"01[1]0\"; repeat for a sweep"
                             : "input tape literal such as \"01[1]0\"")
      // A literal like "[0]" is one tape, not a bracketed list.
      ->allow_extra_args(false);
  app->add_option("--config", c.config, "key = value file with the same keys as the flags");
  if (many_tapes)
    app->add_option("--jobs", c.jobs, "worker threads for multi-tape sweeps")
        ->check(CLI::PositiveNumber);
}

void add_run(CLI::App* app, RunArgs& r) {
  app->add_option("--mode", r.mode, "intrinsic | compactified | ambient")
      ->check(CLI::IsMember({"intrinsic", "compactified", "ambient"}));
  app->add_option("--horizon", r.horizon, "integration horizon in clock time")
      ->check(CLI::PositiveNumber);
  app->add_option("--threshold", r.threshold, "ambient blow-up threshold on |x|")
      ->check(CLI::PositiveNumber);
  app->add_option("--tol-abs", r.tol_abs, "absolute tolerance")->check(CLI::PositiveNumber);
  app->add_option("--tol-rel", r.tol_rel, "relative tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-step", r.max_step, "largest adaptive step")->check(CLI::PositiveNumber);
  app->add_option("--method", r.method, "dp45 (adaptive) | rk4 (fixed step)")
      ->check(CLI::IsMember({"dp45", "rk4"}));
  app->add_option("--step", r.fixed_step, "rk4 step")->check(CLI::PositiveNumber);
  app->add_option("--sample-dt", r.sample_dt, "minimum spacing of exported samples")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--export", r.export_path, "trajectory output path");
  app->add_option("--format", r.format, "csv | jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app->add_option("--report", r.report_path, "also write the JSON report here");
  app->add_option("--budget", r.budget, "step budget of the symbolic prediction");
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends config-file settings for every key the command line leaves unset.
std::vector<std::string> with_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InputError("config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw InputError("config " + path + ": " + e.what());
  }
  std::vector<std::string> extra;
  for (const auto& item : items) {
    if (item.name == "config" || !item.parents.empty())
      throw InputError("config " + path + ": unsupported key '" + item.fullname() + "'");
    const std::string flag = "--" + item.name;
    if (has_flag(args, flag)) continue;
    for (const auto& v : item.inputs) {
      extra.push_back(flag);
      extra.push_back(v);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class F>
void parallel_for(std::size_t n, std::size_t jobs, F f) {
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) f(i);
    });
  for (auto& t : pool) t.join();
}

std::vector<Tape> parse_tapes(const Common& c, const TMSpec& spec) {
  std::vector<Tape> out;
  if (c.tapes.empty()) out.emplace_back();
  for (const auto& literal : c.tapes) {
    try {
      out.push_back(parse_tape_literal(literal, spec.alphabet_size));
    } catch (const FormatError& e) {
      throw InputError("tape '" + literal + "': " + e.what());
    }
    out.back().canonicalize();
  }
  return out;
}

int cmd_run(const Common& c, const RunArgs& r, std::ostream& out) {
  const TMSpec spec = load_tm_file(c.machine);
  const auto tapes = parse_tapes(c, spec);
  if (!r.export_path.empty() && tapes.size() != 1)
    throw InputError("--export needs exactly one --tape");
  const System sys = System::build(spec);

  RunOptions opt;
  opt.horizon = r.horizon;
  opt.threshold = r.threshold;
  opt.sample_dt = r.sample_dt;
  opt.predict_budget = r.budget;
  opt.integrator.abs_tol = r.tol_abs;
  opt.integrator.rel_tol = r.tol_rel;
  opt.integrator.max_step = r.max_step;
  opt.integrator.fixed_step = r.fixed_step;
  opt.integrator.method = r.method == "rk4" ? Method::ClassicalRK4 : Method::DormandPrince45;
  const Mode mode = parse_mode(r.mode);

  std::vector<RunReport> reports(tapes.size());
  Trajectory trajectory;
  parallel_for(tapes.size(), c.jobs, [&](std::size_t i) {
    RunOptions o = opt;
    if (!r.export_path.empty()) o.record = &trajectory;
    reports[i] = run_mode(sys, mode, start_config(spec, tapes[i]), o);
  });

  bool numerical_failure = false;
  nlohmann::json all = nlohmann::json::array();
  for (std::size_t i = 0; i < tapes.size(); ++i) {
    nlohmann::json j = reports[i].to_json();
    j["machine"] = c.machine;
    j["tape"] = format_tape_literal(tapes[i]);
    all.push_back(std::move(j));
    numerical_failure |= reports[i].outcome == Outcome::NumericalFailure;
  }
  const nlohmann::json doc = tapes.size() == 1 ? all[0] : all;
  out << doc.dump(2) << '\n';
  if (!r.report_path.empty()) {
    std::ofstream rf(r.report_path);
    if (!rf) throw InputError("cannot write report to " + r.report_path);
    rf << doc.dump(2) << '\n';
  }
  if (!r.export_path.empty())
    save_trajectory(r.export_path, trajectory, parse_format(r.format));
  return numerical_failure ? kNumericalError : kOk;
}

int cmd_predict(const Common& c, std::size_t budget, std::ostream& out) {
  const TMSpec spec = load_tm_file(c.machine);
  const auto tapes = parse_tapes(c, spec);
  std::vector<BlowupPrediction> preds(tapes.size());
  parallel_for(tapes.size(), c.jobs,
               [&](std::size_t i) { preds[i] = predict_blowup_time(spec, tapes[i], budget); });
  for (std::size_t i = 0; i < tapes.size(); ++i) {
    if (tapes.size() > 1) out << format_tape_literal(tapes[i]) << ": ";
    if (preds[i].halts)
      out << format_number(preds[i].tau) << " (halts after " << preds[i].steps << " steps)\n";
    else
      out << "no halt within budget " << budget << '\n';
  }
  return kOk;
}

int cmd_check(const Common& c, const CheckArgs& a, std::ostream& out) {
  const TMSpec spec = load_tm_file(c.machine);
  LayoutOptions lo;
  if (!a.half_side.empty()) {
    try {
      Rational r(a.half_side);
      r.canonicalize();
      if (r <= 0) throw std::invalid_argument("not positive");
      lo.half_side = r;
    } catch (const std::invalid_argument&) {
      throw InputError("--half-side expects a positive rational such as 1/64");
    }
  }
  std::optional<System> sys;
  try {
    sys.emplace(System::build(spec, lo));
  } catch (const RecipeOverflow& e) {
    out << "FAIL layout (recipe overflow: " << e.what() << ")\n";
    return kValidationError;
  }

  checks::Rng rng(a.seed);
  const std::size_t n = a.samples;
  std::vector<checks::SuiteResult> results;
  auto guarded = [&](const std::string& name, auto&& suite) {
    try {
      results.push_back(suite());
    } catch (const std::exception& e) {
      checks::SuiteResult r;
      r.name = name;
      r.fail(e.what());
      results.push_back(std::move(r));
    }
  };
  guarded("layout", [&] { return checks::layout_suite(*sys); });
  const auto configs = checks::sample_reachable(spec, n, rng);
  guarded("conjugacy", [&] { return checks::conjugacy_suite(*sys, configs); });
  guarded("flow-agreement", [&] {
    std::vector<Configuration> few(configs.begin(), configs.begin() + std::max<std::size_t>(1, n / 2));
    return checks::flow_agreement_suite(*sys, few, 1e-6);
  });
  guarded("support", [&] { return checks::support_suite(*sys, n, rng); });
  guarded("geometry", [&] { return checks::geometry_suite(*sys, 100 * n, n, rng); });

  std::size_t failed = 0;
  for (const auto& r : results) {
    out << r.summary() << '\n';
    failed += !r.passed();
  }
  if (failed) {
    out << failed << " of " << results.size() << " suites failed\n";
    return kValidationError;
  }
  out << "all " << results.size() << " suites passed\n";
  return kOk;
}

}  // namespace

int main(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app("Smooth flows on R^11 that blow up exactly when a Turing machine halts.",
               "tmflow");
  app.require_subcommand(1);

  Common common;
  RunArgs run_args;
  CheckArgs check_args;
  std::size_t predict_budget = 10000;

  auto* run = app.add_subcommand("run", "integrate one mode and print the run report");
  add_common(run, common, true);
  add_run(run, run_args);

  auto* exp = app.add_subcommand("export", "integrate and write the sampled trajectory");
  add_common(exp, common, false);
  add_run(exp, run_args);
  exp->get_option("--export")->required();

  auto* predict = app.add_subcommand("predict", "symbolic blow-up time from the halting step count");
  add_common(predict, common, true);
  predict->add_option("--budget", predict_budget, "step budget");

  auto* check = app.add_subcommand("check", "run the invariant suites for one machine");
  add_common(check, common, false);
  check->add_option("--seed", check_args.seed, "sampling seed");
  check->add_option("--samples", check_args.samples, "sample count scale")
      ->check(CLI::PositiveNumber);
  check->add_option("--half-side", check_args.half_side,
                    "override the square half-side (builds deliberately broken layouts)");

  try {
    std::vector<std::string> args = with_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kInputError;
    }
    if (*run) return cmd_run(common, run_args, out);
    if (*exp) return cmd_run(common, run_args, out);
    if (*predict) return cmd_predict(common, predict_budget, out);
    return cmd_check(common, check_args, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const TrajectoryIoError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const RecipeOverflow& e) {
    err << "error: " << e.what() << " (the default layout recipe is limited; see --help)\n";
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace tmflow::cli
