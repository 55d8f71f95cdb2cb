#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "reebpinch/cli_report.hpp"

using namespace reebpinch::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "reebpinch-tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "reebpinch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("cli_report") {
  TEST_CASE("profile-check exit codes") {
    const auto out = scratch("check");
    CHECK(invoke({"profile-check", "--out", out.string()}) == kExitPass);
    CHECK(invoke({"profile-check", "--R0", "1.5", "--A", "0.5", "--c", "0.9", "--out", out.string()}) ==
          kExitFail);
    RunConfig cfg;
    cfg.c = 0.9;
    const auto stem = "profile-check-" + config_tag(cfg);
    const auto doc = slurp(out / (stem + ".json"));
    CHECK(doc.find("c < (R0-1)/(1-log R0)") != std::string::npos);
    CHECK(fs::exists(out / (stem + ".manifest.json")));
    const auto manifest = slurp(out / (stem + ".manifest.json"));
    CHECK(manifest.find("\"wall_time_s\"") != std::string::npos);
    CHECK(manifest.find("\"version\"") != std::string::npos);
  }

  TEST_CASE("usage errors exit 1") {
    const auto out = scratch("usage");
    CHECK(invoke({"frobnicate"}) == kExitUsage);
    CHECK(invoke({"verify-pinch", "--out", out.string()}) == kExitUsage);
    CHECK(invoke({"verify-pinch", "--surface", (out / "missing.json").string()}) == kExitUsage);
    CHECK(invoke({"profile-check", "--tol", "-1"}) == kExitUsage);
    write(out / "bad.json", "{\n  \"R0\": 1.5,\n  \"A\": \n}\n");
    CHECK(invoke({"profile-check", "--config", (out / "bad.json").string()}) == kExitUsage);
    write(out / "unknown.json", "{\"R0\": 1.5, \"bogus\": 1}");
    CHECK(invoke({"profile-check", "--config", (out / "unknown.json").string()}) == kExitUsage);
  }

  TEST_CASE("malformed config diagnostic carries a line number") {
    const auto out = scratch("diag");
    write(out / "bad.json", "{\n  \"R0\": 1.5,\n  \"A\": \n}\n");
    const char* argv[] = {"reebpinch", "profile-check", "--config", nullptr};
    const std::string path = (out / "bad.json").string();
    argv[3] = path.c_str();
    try {
      parse_args(4, argv);
      FAIL("expected a parse failure");
    } catch (const std::exception& e) {
      const std::string msg = e.what();
      CHECK(msg.find(path + ":4:") != std::string::npos);
    }
  }

  TEST_CASE("flags and config files hash identically") {
    const auto out = scratch("hash");
    write(out / "cfg.json", R"({"command": "verify-ellipsoid", "radii": [1, 1.2], "seeds": 16, "out": "o"})");
    const char* a1[] = {"reebpinch", "verify-ellipsoid", "--radii", "1,1.2", "--seeds", "16"};
    const std::string cfg_path = (out / "cfg.json").string();
    const char* a2[] = {"reebpinch", "--config", cfg_path.c_str()};
    const auto c1 = parse_args(6, a1);
    const auto c2 = parse_args(3, a2);
    REQUIRE(c1);
    REQUIRE(c2);
    CHECK(config_hash(*c1) == config_hash(*c2));
    CHECK(c2->out == out / "o");
    const char* a3[] = {"reebpinch", "--config", cfg_path.c_str(), "--seeds", "17"};
    const auto c3 = parse_args(5, a3);
    REQUIRE(c3);
    CHECK(c3->seeds == 17);
    CHECK(config_hash(*c3) != config_hash(*c1));
  }

  TEST_CASE("verify-ellipsoid, report round trip and plot data") {
    const auto out = scratch("ellipsoid");
    CHECK(invoke({"verify-ellipsoid", "--radii", "1,1.2", "--seeds", "16", "--out", out.string()}) ==
          kExitPass);
    RunConfig cfg;
    cfg.command = Command::verify_ellipsoid;
    cfg.radii = {1.0, 1.2};
    cfg.seeds = 16;
    const auto stem = "verify-ellipsoid-" + config_tag(cfg);
    const auto report = out / (stem + ".json");
    REQUIRE(fs::exists(report));
    CHECK(slurp(report).find("\"distinct_count\": 2") != std::string::npos);
    const auto csv = slurp(out / (stem + "-spectrum.csv"));
    CHECK(csv.rfind("action,period,multiplicity\n", 0) == 0);
    CHECK(csv.find("3.14159265") != std::string::npos);
    CHECK(csv.find("4.52389342") != std::string::npos);

    CHECK(invoke({"report", "--input", report.string(), "--out", out.string()}) == kExitPass);
    RunConfig rc;
    rc.command = Command::report;
    rc.input = report;
    const auto s1 = slurp(out / ("report-" + config_tag(rc) + ".json"));
    CHECK(invoke({"report", "--input", report.string(), "--out", out.string()}) == kExitPass);
    CHECK(slurp(out / ("report-" + config_tag(rc) + ".json")) == s1);
    CHECK(s1.find("\"consistent\": true") != std::string::npos);
  }

  TEST_CASE("verify-pinch is not applicable beyond the pinching ratio") {
    const auto out = scratch("pinch");
    write(out / "wide.json", R"({"n": 2, "kind": "ellipsoid", "params": {"radii": [1, 1.5]}})");
    CHECK(invoke({"verify-pinch", "--surface", (out / "wide.json").string(), "--out", out.string()}) ==
          kExitNotApplicable);
    write(out / "sphere.json", R"({"n": 2, "kind": "sphere", "params": {"R": 1}})");
    CHECK(invoke({"verify-pinch", "--surface", (out / "sphere.json").string(), "--seeds", "8", "--out",
                  out.string()}) == kExitPass);
  }

  TEST_CASE("profile and trajectory plot data") {
    const auto out = scratch("plots");
    CHECK(invoke({"profile-build", "--out", out.string()}) == kExitPass);
    CHECK(invoke({"ode-connect", "--out", out.string()}) == kExitPass);
    CHECK(invoke({"ode-probe", "--out", out.string()}) == kExitPass);
    RunConfig pb;
    pb.command = Command::profile_build;
    CHECK(slurp(out / ("profile-build-" + config_tag(pb) + "-profile.csv")).rfind("r,h,dh,ddh\n", 0) == 0);
    RunConfig oc;
    oc.command = Command::ode_connect;
    const auto traj = slurp(out / ("ode-connect-" + config_tag(oc) + "-trajectory.csv"));
    CHECK(traj.rfind("s,F,G,rho,margin\n", 0) == 0);
    // First row is on the frozen piece, last row at the target level.
    std::istringstream rows(traj);
    std::string line, first, last;
    std::getline(rows, line);
    std::getline(rows, first);
    while (std::getline(rows, line)) {
      if (!line.empty()) last = line;
    }
    CHECK(first.find(",0.5,") != std::string::npos);
    CHECK(last.find(",1.40118") != std::string::npos);
  }
}
