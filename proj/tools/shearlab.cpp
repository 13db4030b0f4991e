#include "shearlab/acceptance.hpp"
#include "shearlab/experiments.hpp"
#include "shearlab/numerics.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace shearlab;

namespace {

void print_list() {
  for (const auto& e : experiment_registry()) {
    std::cout << e.name << "\n  " << e.summary << "\n  pass: " << e.pass_rule << "\n";
    for (const auto& p : e.params)
      std::cout << "    --" << p.name << " (default '" << p.default_value << "')" << (p.help.empty() ? "" : "  ")
                << p.help << "\n";
  }
  std::cout << "acceptance\n  runs criteria 1-12 and writes acceptance.csv\n";
}

int run_acceptance(const std::filesystem::path& out, const std::vector<int>& only) {
  AcceptanceOptions opt;
  opt.only = only;
  opt.on_result = [](const CriterionResult& r) { std::cout << format_criterion(r) << std::endl; };
  const auto results = run_acceptance_suite(opt);
  std::filesystem::create_directories(out);
  std::ofstream csv(out / "acceptance.csv", std::ios::binary);
  csv << "criterion,title,pass,seconds,budget\n";
  bool all = true;
  for (const auto& r : results) {
    csv << r.id << ',' << r.title << ',' << (r.pass ? 1 : 0) << ',' << fmt(r.seconds) << ',' << fmt(r.budget) << '\n';
    all = all && r.pass;
  }
  std::cout << (all ? "all criteria passed" : "some criteria failed") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shearlab: Robin heat flows, Rayleigh instability and expansion bookkeeping"};
  std::string experiment;
  std::string out;
  std::string config_file;
  std::uint64_t seed = 20240611;
  std::vector<int> only;
  app.add_option("experiment", experiment, "experiment name, 'list' or 'acceptance'")->required();
  app.add_option("--out", out, "output directory (default $SHEARLAB_OUT or ./shearlab-out)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--config", config_file, "flat key = value file; command-line keys override it");
  app.add_option("--criterion", only, "acceptance: run only these criteria");
  app.allow_extras();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (out.empty()) {
    const char* env = std::getenv("SHEARLAB_OUT");
    out = env && *env ? env : "shearlab-out";
  }
  try {
    if (experiment == "list") {
      print_list();
      return 0;
    }
    if (experiment == "acceptance") return run_acceptance(out, only);

    ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.output_dir = out;
    cfg.seed = seed;
    if (!config_file.empty()) cfg.parameters = parse_config_file(config_file);
    const std::vector<std::string> extra = app.remaining();
    for (size_t i = 0; i < extra.size(); ++i) {
      std::string key = extra[i];
      if (key.rfind("--", 0) != 0) throw ConfigError(key, "expected --key value");
      key = key.substr(2);
      std::string value;
      const auto eq = key.find('=');
      if (eq != std::string::npos) {
        value = key.substr(eq + 1);
        key = key.substr(0, eq);
      } else {
        if (i + 1 >= extra.size()) throw ConfigError(key, "missing value");
        value = extra[++i];
      }
      cfg.parameters[key] = value;
    }
    const RunReport r = run(cfg);
    std::cout << format_report(r);
    return r.pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure in " << experiment << ": " << e.what() << "\n";
    return 1;
  }
}
