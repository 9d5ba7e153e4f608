//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_TOOLS_CLI_HPP
#define MHNPATH_TOOLS_CLI_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mhnpath/search/search.hpp"

namespace mhnpath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct PrioritizerPaths {
  std::string templates;
  std::vector<std::string> models;
};

/// Resolved settings of one invocation: flag > config file > default.
struct RunConfig {
  std::vector<PrioritizerPaths> prioritizers;
  std::string catalog;
  std::string toxicity;
  std::string conditions;
  /// argv of an external condition predictor (used when conditions is empty).
  std::vector<std::string> condition_command;
  search::SearchConfig search;
  bool kelvin = false;
  /// ModelConfig keys applied over the defaults.
  nlohmann::json model = nlohmann::json::object();
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  /// "quiet", "info" or "debug".
  std::string log_level = "info";
};

/// Applies a config file object onto cfg. Unknown keys raise ConfigError.
void apply_config_json(RunConfig &cfg, const nlohmann::json &j);

/// Raw flag values; an option's count() tells whether it was given.
struct Flags {
  std::string config;
  std::string output_dir;
  std::uint64_t seed = 0;
  std::string log_level;
  std::string templates;
  std::vector<std::string> models;
  std::string catalog;
  std::string toxicity;
  std::string conditions;

  std::string dataset;
  std::string model_out;
  int epochs = 0;

  std::string smiles;
  int n = 10;
  bool screen = false;

  double w_cost = 1, w_temp = 1, w_solv = 1;
  double time_limit = 0;
  int max_depth = 5;
  int max_expansions = 0;
  int top_n = 50;
  int route_limit = 0;
  bool kelvin = false;

  std::string cases;
  int threads = 1;

  std::string reactions;
  int radius = 1;
  std::string library_out;

  std::string molecules;
  std::string endpoint;
};

/// The full command tree. Every option carries a description.
std::unique_ptr<CLI::App> make_app(Flags &flags);

/// Runs one command line (args excludes the program name) and returns the
/// exit code: 0 success, 1 runtime failure, 2 usage or config error.
/// cancel, when set, stops a running search between expansions.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
        const std::atomic<bool> *cancel = nullptr);

}  // namespace mhnpath::cli

#endif  // MHNPATH_TOOLS_CLI_HPP
