#pragma once

#include "shearlab/profile.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace shearlab {

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

using Params = std::map<std::string, std::string>;

struct ExperimentConfig {
  std::string experiment;
  Params parameters;
  std::filesystem::path output_dir = "shearlab-out";
  std::uint64_t seed = 20240611;
};

struct RunReport {
  std::string experiment;
  bool pass = false;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> notes;
  std::vector<std::filesystem::path> artifacts;
  double wall_time = 0.0;
};

struct ParamSpec {
  std::string name;
  std::string default_value;
  std::string help;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::string pass_rule;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& experiment_info(const std::string& name);

// key = value lines; '#' starts a comment; blank lines ignored
Params parse_config_text(const std::string& text);
Params parse_config_file(const std::filesystem::path& path);

// fills defaults and rejects keys outside the schema
Params resolve_params(const ExperimentInfo& info, const Params& given);

// profile=gevrey|two-inflection|constant|ramp|zero|exponential|cutoff-exponential with its own keys
ShearProfile profile_from_params(const Params& p);

// writes <output_dir>/<experiment>/*.csv and a gnuplot script; deterministic for a given config
RunReport run(const ExperimentConfig& config);

std::string format_report(const RunReport& r);

// number formatting shared by every CSV writer
std::string fmt(double x);

}  // namespace shearlab
