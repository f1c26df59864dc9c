#include "thetafv/app/config.hpp"
#include "thetafv/app/runner.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace thetafv;
using namespace thetafv::app;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("thetafv_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

json small_diffusion() {
  return {{"problem.kind", "diffusion"},   {"grid.cells", 30},        {"scheme.theta", 1.0},
          {"scheme.matrix_level", "tridiagonal"}, {"controller.mode", "ramp"}, {"controller.cap", 1e6},
          {"run.max_iterations", 500}};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + THETAFV_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config: defaults per problem") {
  const RunConfig d = default_config(ProblemKind::Diffusion);
  CHECK(d.grid.cells == 180);
  CHECK(d.grid.r_in == 1000.0);
  const RunConfig w = default_config(ProblemKind::Wave);
  CHECK(w.scheme.theta == 0.5);
  CHECK(std::isfinite(w.end_time));
  const RunConfig f = default_config(ProblemKind::FreeFall);
  CHECK(f.scheme.matrix_level == MatrixLevel::BlockDiagonal);
  CHECK(f.grid.stretch > 1.0);
  for (auto k : {ProblemKind::Diffusion, ProblemKind::Wave, ProblemKind::FreeFall}) {
    CHECK_NOTHROW(default_config(k).validate());
    CHECK(problem_kind_from_string(to_string(k)) == k);
  }
}

TEST_CASE("config: parsing overrides single fields") {
  const RunConfig c = parse_config(small_diffusion());
  CHECK(c.problem == ProblemKind::Diffusion);
  CHECK(c.grid.cells == 30);
  CHECK(c.scheme.matrix_level == MatrixLevel::Tridiagonal);
  CHECK(c.controller.mode == ControllerMode::Ramp);
  CHECK(c.controller.cap == 1e6);
  CHECK(c.max_iterations == 500);

  const RunConfig w = parse_config({{"problem.kind", "wave"}, {"problem.order", "first"}, {"run.end_time", nullptr}});
  CHECK(w.wave.order == AdvectionOrder::FirstOrderUpwind);
  CHECK(std::isinf(w.end_time));
}

TEST_CASE("config: bad input is rejected") {
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
  CHECK(parse_config({{"grid.cells", 30}}).problem == ProblemKind::Diffusion);  // kind defaults to diffusion
  CHECK_THROWS_AS(parse_config({{"problem.kind", "heat"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"problem.kind", "diffusion"}, {"grid.cellz", 30}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"problem.kind", "diffusion"}, {"problem.velocity", 2.0}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"problem.kind", "diffusion"}, {"grid.cells", "many"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"problem.kind", "diffusion"}, {"grid.cells", 2.5}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"problem.kind", "diffusion"}, {"scheme.theta", 2.0}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"problem.kind", "diffusion"}, {"controller.local", true}, {"run.end_time", 1.0}}),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);

  RunConfig c = default_config(ProblemKind::Wave);
  CHECK_THROWS_AS(set_value(c, "problem.kind", "freefall"), ConfigError);
  CHECK_THROWS_AS(set_value(c, "problem.gamma", 1.4), ConfigError);
  CHECK_NOTHROW(set_value(c, "problem.velocity", 2.0));
}

TEST_CASE("config: key listing is per problem") {
  const auto keys = known_keys(ProblemKind::FreeFall);
  auto has = [&](const std::string& k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
  CHECK(has("problem.gamma"));
  CHECK(has("scheme.theta"));
  CHECK(has("controller.local"));
  CHECK_FALSE(has("problem.nu"));
}

TEST_CASE("runner: CSV outputs with fixed headers, reproducible bit for bit") {
  const fs::path dir = scratch_dir("run");
  const RunConfig c = parse_config(small_diffusion());
  const RunReport a = run(c, dir / "a");
  const RunReport b = run(c, dir / "b");
  CHECK(a.outcome == Outcome::Converged);
  CHECK(a.exit_code() == 0);
  CHECK(a.iterations == b.iterations);
  CHECK(first_line(dir / "a" / "history.csv") == "iteration,time,dt,cfl,cfl_paper,residual_inf,inner_iters");
  CHECK(first_line(dir / "a" / "profile.csv") == "cell_index,r_center,T");
  CHECK(first_line(dir / "a" / "reference.csv") == "cell_index,r_center,T");
  CHECK(slurp(dir / "a" / "history.csv") == slurp(dir / "b" / "history.csv"));
  CHECK(slurp(dir / "a" / "profile.csv") == slurp(dir / "b" / "profile.csv"));

  std::ifstream hist(dir / "a" / "history.csv");
  std::size_t lines = 0;
  for (std::string l; std::getline(hist, l);) ++lines;
  CHECK(lines == a.iterations + 1);

  const std::string report = format_report(a);
  CHECK(report.find("outcome: converged") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("runner: number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("runner: sweep writes one directory per value and a summary") {
  const fs::path dir = scratch_dir("sweep");
  json cfg = small_diffusion();
  cfg["scheme.theta"] = 0.0;
  cfg["scheme.matrix_level"] = "identity";
  cfg["controller.mode"] = "fixed_cfl";
  cfg["controller.convention"] = "paper";
  cfg["run.max_iterations"] = 200;
  const auto rows = sweep(parse_config(cfg), "controller.cfl", split_values("0.4, 1.75"), dir);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].report.outcome == Outcome::Diverged);
  CHECK(fs::exists(dir / "controller.cfl=0.4" / "history.csv"));
  CHECK(fs::exists(dir / "controller.cfl=1.75" / "profile.csv"));
  std::ifstream summary(dir / "sweep_summary.csv");
  std::string header, first, second;
  std::getline(summary, header);
  std::getline(summary, first);
  std::getline(summary, second);
  CHECK(header == "value,outcome,iterations,final_residual");
  CHECK(first.rfind("0.4,", 0) == 0);
  CHECK(second.rfind("1.75,diverged,", 0) == 0);

  CHECK_THROWS_AS(split_values("1,,2"), ConfigError);
  CHECK_THROWS_AS(sweep(parse_config(cfg), "controller.cfl", {"1", "-1"}, dir / "bad"), ConfigError);
  CHECK_FALSE(fs::exists(dir / "bad"));  // nothing runs when one value is invalid
  CHECK(sweep_value("2.5") == json(2.5));
  CHECK(sweep_value("tridiagonal") == json("tridiagonal"));
  fs::remove_all(dir);
}

TEST_CASE("cli: exit codes") {
  const fs::path dir = scratch_dir("cli");
  json diverging = small_diffusion();
  diverging["scheme.theta"] = 0.0;
  diverging["scheme.matrix_level"] = "identity";
  diverging["controller.mode"] = "fixed_cfl";
  diverging["controller.convention"] = "paper";
  diverging["controller.cfl"] = 1.75;
  std::ofstream(dir / "diverge.json") << diverging.dump();
  std::ofstream(dir / "ok.json") << small_diffusion().dump();
  json budget = small_diffusion();
  budget["run.max_iterations"] = 3;
  std::ofstream(dir / "budget.json") << budget.dump();
  std::ofstream(dir / "bad.json") << R"({"problem.kind": "diffusion", "scheme.thetaa": 1})";
  std::ofstream(dir / "broken.json") << "{ not json";

  const fs::path log = dir / "log.txt";
  CHECK(run_cli("run --config " + (dir / "ok.json").string() + " --out-dir " + (dir / "ok").string(), log) == 0);
  CHECK(slurp(log).find("outcome: converged") != std::string::npos);
  CHECK(run_cli("run --config " + (dir / "diverge.json").string() + " --out-dir " + (dir / "d").string(), log) == 3);
  CHECK(run_cli("run --config " + (dir / "budget.json").string() + " --out-dir " + (dir / "b").string(), log) == 4);
  CHECK(run_cli("run --config " + (dir / "bad.json").string(), log) == 1);
  CHECK(slurp(log).find("scheme.thetaa") != std::string::npos);
  CHECK(run_cli("run --config " + (dir / "broken.json").string(), log) == 1);
  CHECK(run_cli("run", log) == 1);
  CHECK(run_cli("--help", log) == 0);
  CHECK(run_cli("sweep --config " + (dir / "ok.json").string() + " --param grid.cells --values 20,40 --out-dir " +
                    (dir / "s").string(),
                log) == 0);
  CHECK(fs::exists(dir / "s" / "sweep_summary.csv"));
  fs::remove_all(dir);
}
