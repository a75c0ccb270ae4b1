#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tmflow/cli.hpp"
#include "tmflow/runtime.hpp"
#include "tmflow/trajectory_io.hpp"

using namespace tmflow;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tmflow::cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kData = TMFLOW_DATA_DIR;
const std::string kFixtures = TMFLOW_FIXTURE_DIR;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tmflow_test_" + name)).string();
}

}  // namespace

TEST_CASE("run halt3 in compactified mode") {
  const auto r = invoke({"run", "--machine", kData + "/halt3.tm", "--tape", "[0]", "--mode", "compactified"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["outcome"]["kind"] == "PlateauHit");
  const double t = j["outcome"]["t_detect"];
  CHECK(t >= 2.93);
  CHECK(t <= 2.95);
  CHECK(j["tape"] == "[0]");
}

TEST_CASE("run loop in ambient mode") {
  const auto r = invoke({"run", "--machine", kData + "/loop.tm", "--mode", "ambient", "--horizon", "50"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["outcome"]["kind"] == "Bounded");
  CHECK(j["sup_norm"].template get<double>() == doctest::Approx(2.2361).epsilon(1e-4));
  CHECK(j["t_max"] == "inf");
}

TEST_CASE("input errors exit with code 2") {
  const auto missing = invoke({"run", "--machine", "/nonexistent.tm"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("file not found") != std::string::npos);

  const auto partial = invoke({"run", "--machine", kFixtures + "/partial.tm"});
  CHECK(partial.code == 2);
  CHECK(partial.err.find("missing transition") != std::string::npos);

  CHECK(invoke({"run", "--machine", kData + "/halt3.tm", "--tape", "[2]"}).code == 2);
  CHECK(invoke({"run", "--machine", kData + "/halt3.tm", "--mode", "sideways"}).code == 2);
  CHECK(invoke({"run", "--machine", kData + "/halt3.tm", "--horizon", "-1"}).code == 2);
  CHECK(invoke({"run"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"check", "--machine", kData + "/halt3.tm", "--half-side", "abc"}).code == 2);
  CHECK(invoke({"run", "--machine", kData + "/halt3.tm", "--config", "/nonexistent.cfg"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("recipe overflow is a validation failure") {
  const auto r = invoke({"run", "--machine", kFixtures + "/q17.tm"});
  CHECK(r.code == 3);
  const auto c = invoke({"check", "--machine", kFixtures + "/q17.tm"});
  CHECK(c.code == 3);
  CHECK(c.out.find("recipe overflow") != std::string::npos);
}

TEST_CASE("check") {
  const auto ok = invoke({"check", "--machine", kData + "/halt3.tm", "--samples", "20"});
  CHECK(ok.code == 0);
  for (const char* suite : {"PASS layout", "PASS conjugacy", "PASS flow-agreement", "PASS support",
                            "PASS geometry"})
    CHECK(ok.out.find(suite) != std::string::npos);

  const auto broken =
      invoke({"check", "--machine", kData + "/halt3.tm", "--samples", "10", "--half-side", "1/8"});
  CHECK(broken.code == 3);
  CHECK(broken.out.find("FAIL layout") != std::string::npos);
  CHECK(broken.out.find("squares B[") != std::string::npos);
}

TEST_CASE("predict") {
  const auto h = invoke({"predict", "--machine", kData + "/halt3.tm", "--tape", "[0]"});
  CHECK(h.code == 0);
  CHECK(h.out.rfind("2.95 ", 0) == 0);
  const auto l = invoke({"predict", "--machine", kData + "/loop.tm", "--budget", "1000"});
  CHECK(l.code == 0);
  CHECK(l.out == "no halt within budget 1000\n");
  const auto many =
      invoke({"predict", "--machine", kData + "/halt3.tm", "--tape", "[0]", "--tape", "[1]", "--jobs", "2"});
  CHECK(many.out == "[0]: 2.95 (halts after 3 steps)\n[1]: 0.95 (halts after 1 steps)\n");
}

TEST_CASE("export and re-import") {
  for (const char* fmt : {"csv", "jsonl"}) {
    CAPTURE(fmt);
    const std::string path = temp_path(std::string("export.") + fmt);
    const auto r = invoke({"export", "--machine", kData + "/halt3.tm", "--mode", "ambient", "--export",
                        path, "--format", fmt, "--sample-dt", "0.01"});
    REQUIRE(r.code == 0);
    const Trajectory loaded = load_trajectory(path, parse_format(fmt));

    const TMSpec spec = load_tm_file(kData + "/halt3.tm");
    const System sys = System::build(spec);
    Trajectory direct;
    RunOptions o;
    o.record = &direct;
    o.sample_dt = 0.01;
    integrate_ambient(sys, start_config(spec), o);
    CHECK(loaded == direct);
    CHECK(loaded.columns.size() == 14);
    std::remove(path.c_str());
  }
  CHECK(invoke({"export", "--machine", kData + "/halt3.tm"}).code == 2);
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"run", "--machine", kData + "/bb-small.tm", "--mode", "ambient"};
  CHECK(invoke(args).out == invoke(args).out);
  const std::vector<std::string> check{"check", "--machine", kData + "/halt3.tm", "--samples", "10", "--seed", "5"};
  CHECK(invoke(check).out == invoke(check).out);
}

TEST_CASE("sweeps over several tapes") {
  std::vector<std::string> args{"run", "--machine", kData + "/halt3.tm", "--tape", "[0]", "--tape", "[1]",
                                "--tape", "1[0]"};
  const auto serial = invoke(args);
  args.insert(args.end(), {"--jobs", "3"});
  const auto parallel = invoke(args);
  CHECK(serial.code == 0);
  CHECK(serial.out == parallel.out);
  const auto j = nlohmann::json::parse(serial.out);
  REQUIRE(j.size() == 3);
  CHECK(j[1]["halting_steps"] == 1);
}

TEST_CASE("config file with flags taking precedence") {
  const std::string cfg = kFixtures + "/run.cfg";
  const auto from_file = invoke({"run", "--machine", kData + "/loop.tm", "--config", cfg});
  REQUIRE(from_file.code == 0);
  const auto j = nlohmann::json::parse(from_file.out);
  CHECK(j["mode"] == "ambient");
  CHECK(j["horizon"] == 50.0);
  CHECK(j["tape"] == "1[0]1");

  const auto overridden =
      invoke({"run", "--machine", kData + "/loop.tm", "--config", cfg, "--horizon", "3", "--mode", "intrinsic"});
  const auto k = nlohmann::json::parse(overridden.out);
  CHECK(k["mode"] == "intrinsic");
  CHECK(k["horizon"] == 3.0);
  CHECK(k["tape"] == "1[0]1");
}

TEST_CASE("numerical failure exits with code 4") {
  const auto r = invoke({"run", "--machine", kData + "/halt3.tm", "--method", "rk4", "--step", "0.5"});
  // A step far above every window width either derails or is rejected; both
  // must be reported, never crash.
  CHECK((r.code == 0 || r.code == 4));
  const auto u = invoke({"run", "--machine", kData + "/halt3.tm", "--tol-abs", "1e-300", "--tol-rel",
                      "1e-300", "--max-step", "1e-3"});
  CHECK(u.code == 4);
}
