#include "shearlab/experiments.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace shearlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("shearlab-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

RunReport run_in(const fs::path& dir, const std::string& experiment, Params params = {}, std::uint64_t seed = 1) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.parameters = std::move(params);
  cfg.output_dir = dir;
  cfg.seed = seed;
  return run(cfg);
}

int cli(const std::string& args) {
  const std::string cmd = std::string(SHEARLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config text parsing") {
  const Params p = parse_config_text("# comment\n gamma = 0.6 \n\nN=1  # trailing\nM = 2\n");
  CHECK(p.at("gamma") == "0.6");
  CHECK(p.at("N") == "1");
  CHECK(p.at("M") == "2");
  CHECK(p.size() == 3);
  CHECK_THROWS_AS(parse_config_text("gamma 0.6\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(" = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/shearlab.cfg"), ConfigError);
}

TEST_CASE("schema resolution fills defaults and rejects strangers") {
  const ExperimentInfo& info = experiment_info("plan");
  const Params r = resolve_params(info, {{"gamma", "0.6"}});
  CHECK(r.at("gamma") == "0.6");
  CHECK(r.at("N") == "1");
  CHECK(r.at("M") == "3");
  try {
    resolve_params(info, {{"gama", "0.6"}});
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "gama");
  }
  CHECK_THROWS_AS(experiment_info("nope"), ConfigError);
  CHECK(experiment_registry().size() == 12);
}

TEST_CASE("profiles from parameters") {
  CHECK(profile_from_params({{"profile", "gevrey"}, {"rho", "2"}})(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(profile_from_params({{"profile", "constant"}, {"value", "0.3"}})(5.0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(profile_from_params({{"profile", "parabola"}}), ConfigError);
  CHECK_THROWS_AS(profile_from_params({{"profile", "gevrey"}, {"rho", "two"}}), ConfigError);
}

TEST_CASE("plan experiment at gamma = 0.6, N = 1, M = 2") {
  const fs::path d = scratch("plan");
  const RunReport r = run_in(d, "plan", {{"gamma", "0.6"}, {"N", "1"}, {"M", "2"}});
  CHECK(r.pass);
  CHECK(r.metrics.at("n") == 4.0);
  CHECK(r.metrics.at("a") == doctest::Approx(0.15));
  CHECK(r.metrics.at("theta") == doctest::Approx(0.1));
  CHECK(r.notes.at("regime") == "Neumann_mid");
  CHECK(first_line(d / "plan" / "orders.csv") == "j,k_j,nu_order_uI,nu_order_ub");
  const std::string orders = slurp(d / "plan" / "orders.csv");
  CHECK(orders.find("17/16") != std::string::npos);
  CHECK(slurp(d / "plan" / "plan.txt").find("19/16") != std::string::npos);
  CHECK(first_line(d / "plan" / "metrics.csv") == "metric,value");
}

TEST_CASE("same seed, same bytes") {
  const fs::path a = scratch("det-a"), b = scratch("det-b");
  const Params g{{"T", "40"}, {"n", "400"}, {"dt", "0.02"}};
  run_in(a, "growth-oracle", g, 42);
  run_in(b, "growth-oracle", g, 42);
  for (const char* f : {"growth.csv", "metrics.csv"}) {
    CAPTURE(f);
    const std::string x = slurp(a / "growth-oracle" / f);
    CHECK_FALSE(x.empty());
    CHECK(x == slurp(b / "growth-oracle" / f));
  }
  CHECK(first_line(a / "growth-oracle" / "growth.csv") == "t,log_norm");
  run_in(a, "instability-time");
  run_in(b, "instability-time");
  CHECK(slurp(a / "instability-time" / "instability_time.csv") ==
        slurp(b / "instability-time" / "instability_time.csv"));
  CHECK(first_line(a / "instability-time" / "instability_time.csv") == "nu,T,T_nu,sqrt_nu_T,residual");
}

TEST_CASE("quick experiments report sensible metrics") {
  const fs::path d = scratch("quick");
  const RunReport e = run_in(d, "erf-reference");
  CHECK(e.pass);
  const RunReport it = run_in(d, "instability-time");
  CHECK(it.pass);
  CHECK(it.metrics.at("max_residual") < 1e-12);
  const RunReport c = run_in(d, "certify");
  CHECK(c.pass);
  CHECK_FALSE(format_report(c).empty());
}

TEST_CASE("command-line exit codes") {
  const fs::path d = scratch("cli");
  const std::string out = " --out " + d.string();
  CHECK(cli("list") == 0);
  CHECK(cli("--help") == 0);
  CHECK(cli("plan --gamma 0.6 --N 1 --M 2" + out) == 0);
  CHECK(fs::exists(d / "plan" / "orders.csv"));
  CHECK(cli("plan --gamma=1" + out) == 0);
  // a run that completes but fails its own check
  CHECK(cli("instability-time --sigma0 1 --tau 1000" + out) != 0);
  CHECK(cli("certify --profile constant" + out) == 1);
  // configuration problems
  CHECK(cli("no-such-experiment" + out) == 2);
  CHECK(cli("plan --gama 0.6" + out) == 2);
  CHECK(cli("plan --gamma 0.5" + out) == 2);
  CHECK(cli("plan --config /nonexistent.cfg" + out) == 2);
  const fs::path cfg = d / "plan.cfg";
  std::ofstream(cfg) << "gamma = 0.8\nM = 1\n";
  CHECK(cli("plan --config " + cfg.string() + out) == 0);
  CHECK(slurp(d / "plan" / "plan.txt").find("4/5") != std::string::npos);
}
