#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path work = GMCF_WORK_DIR;

std::string configs() { return std::string(GMCF_TEST_DATA) + "/../configs/"; }

int gmcf(const std::string& args) {
  fs::create_directories(work);
  const std::string cmd = std::string("\"") + GMCF_CLI + "\" " + args + " > \"" +
                          (work / "last.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

// Small product-flow config; `extra` holds additional --set flags.
std::string product(const std::string& out, const std::string& extra = "") {
  return "run " + configs() + "product_decay.cfg --set grid.resolution=32 -o \"" +
         (work / out).string() + "\" " + extra;
}

}  // namespace

TEST_CASE("check") {
  CHECK(gmcf("check " + configs() + "product_decay.cfg") == 0);
  CHECK(slurp(work / "last.log").find("PASS") != std::string::npos);
  CHECK(gmcf("check " + configs() + "prescribed_cosh.cfg") == 0);
  CHECK(gmcf("check " + configs() + "weighted_cosh.cfg") == 0);
  CHECK(gmcf("check " + configs() + "product_decay.cfg --set 'data.g=\"u\"'") == 1);
  CHECK(gmcf("check " + configs() + "weighted_cosh.cfg --set 'data.phi=\"exp(u)\"'") == 1);
}

TEST_CASE("usage and configuration errors") {
  CHECK(gmcf("") == 64);
  CHECK(gmcf("frobnicate") == 64);
  CHECK(gmcf("check /nonexistent.cfg") == 64);
  CHECK(gmcf("check " + configs() + "product_decay.cfg --set 'data.h=\"-u +\"'") == 64);
  CHECK(slurp(work / "last.log").find("data.h") != std::string::npos);
  CHECK(gmcf("check " + configs() + "product_decay.cfg --set grid.colour=1") == 64);
  CHECK(gmcf("slice-ode " + configs() + "product_decay.cfg") == 64);
  CHECK(gmcf("--help") == 0);
}

TEST_CASE("run outcomes") {
  SUBCASE("already stationary") {
    CHECK(gmcf(product("stationary", "--set 'initial.u=\"0\"'")) == 0);
    const auto s = summary(work / "stationary");
    CHECK(s["termination"] == "stationary");
    CHECK(s["steps"] == 0);
    CHECK(s["exit_code"] == 0);
    for (const char* f : {"trace.csv", "initial_field.csv", "final_field.csv", "monitors.txt"})
      CHECK(fs::exists(work / "stationary" / f));
  }
  SUBCASE("converging run") {
    CHECK(gmcf(product("decay")) == 0);
    const auto s = summary(work / "decay");
    CHECK(s["monitors"]["pass"] == true);
    CHECK(s["final_sup_ut"].get<double>() < 1e-8);
  }
  SUBCASE("time limit") {
    CHECK(gmcf(product("short", "--set integrator.t_max=0.1")) == 2);
    CHECK(summary(work / "short")["termination"] == "max_time");
    CHECK(gmcf(product("few", "--set integrator.max_steps=3")) == 2);
  }
  SUBCASE("oversized step diverges") {
    CHECK(gmcf(product("blowup", "--set integrator.dt=0.05")) == 3);
    CHECK(summary(work / "blowup")["termination"] == "diverged");
  }
  SUBCASE("monitor failure with checks skipped") {
    const std::string bad = "--set 'data.h=\"1.5 - u\"'";
    CHECK(gmcf(product("barrier", bad)) == 5);
    CHECK(summary(work / "barrier").contains("rejected"));
    CHECK(gmcf(product("barrier", bad + " --skip-checks")) == 4);
    CHECK(slurp(work / "barrier" / "monitors.txt").find("barrier FAIL") != std::string::npos);
  }
  SUBCASE("initial data outside the slab") {
    CHECK(gmcf(product("outside", "--set 'initial.u=\"1 + sin(x1)\"'")) == 5);
  }
}

TEST_CASE("runs are bit-reproducible") {
  REQUIRE(gmcf(product("repeat_a")) == 0);
  REQUIRE(gmcf(product("repeat_b")) == 0);
  for (const char* f : {"trace.csv", "final_field.csv", "monitors.txt", "summary.json"}) {
    CAPTURE(f);
    CHECK(slurp(work / "repeat_a" / f) == slurp(work / "repeat_b" / f));
  }
}

TEST_CASE("other kinds") {
  SUBCASE("slice ODE") {
    const fs::path out = work / "slice";
    // r' = -n sinh r has tanh(r/2) = tanh(r0/2) e^{-nt}; n follows grid.dim = 2.
    CHECK(gmcf("slice-ode " + configs() + "slice_cosh.cfg -o \"" + out.string() + "\"") == 0);
    const auto s = summary(out);
    CHECK(s["n"] == 2);
    CHECK(s["r_end"].get<double>() == doctest::Approx(0.0663165668).epsilon(1e-8));
    CHECK(gmcf("slice-ode " + configs() + "slice_cosh.cfg --set slice.n=1 -o \"" +
               (work / "slice1").string() + "\"") == 0);
    CHECK(summary(work / "slice1")["r_end"].get<double>() ==
          doctest::Approx(2.0 * std::atanh(std::tanh(0.25) * std::exp(-1.0))).epsilon(1e-8));
    CHECK(s["steps"] == 1000);
    CHECK(slurp(out / "trajectory.csv").rfind("t,r\n", 0) == 0);
    // `run` dispatches slice configs too.
    CHECK(gmcf("run " + configs() + "slice_cosh.cfg -o \"" + (work / "slice2").string() + "\"") ==
          0);
  }
  SUBCASE("weighted") {
    const fs::path out = work / "weighted";
    CHECK(gmcf("run " + configs() + "weighted_cosh.cfg --set grid.resolution=32 -o \"" +
               out.string() + "\"") == 0);
    const auto s = summary(out);
    CHECK(s["termination"] == "stationary");
    CHECK(s["monitors"]["pass"] == true);
  }
  SUBCASE("prescribed") {
    const fs::path out = work / "prescribed";
    CHECK(gmcf("run " + configs() + "prescribed_cosh.cfg --set grid.resolution=32 -o \"" +
               out.string() + "\"") == 0);
    CHECK(summary(out)["termination"] == "stationary");
  }
  SUBCASE("emit round trip") {
    CHECK(gmcf("emit " + configs() + "weighted_cosh.cfg") == 0);
    const std::string first = slurp(work / "last.log");
    std::ofstream(work / "emitted.cfg") << first;
    CHECK(gmcf("emit \"" + (work / "emitted.cfg").string() + "\"") == 0);
    CHECK(slurp(work / "last.log") == first);
  }
}
