#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bogp/baselines/cd_gss.hpp"
#include "bogp/baselines/priors.hpp"
#include "bogp/engine/bo_engine.hpp"
#include "bogp/olpc/simulator.hpp"

namespace bogp::exp {

struct PriorSource {
  enum class Kind { kConstant, kFile, kSurface };
  Kind kind = Kind::kConstant;
  double value = 0.0;  // constant prior
  std::string path;    // kFile
  std::optional<std::size_t> subsample;  // kSurface
  PriorTransform transform = PriorTransform::kNone;
};

struct DynamicSpec {
  std::vector<int> load_schedule = {4, 16};  // K per step, cycled
  std::vector<double> periods = {1.0, 2.0};  // ESS period D per variant
  bool parallel_static = true;
  double ess_lengthscale = 1.0;
  int max_steps = 50;
  std::optional<std::size_t> window_size = 64;
  KernelSpec kernel;  // top-level kernel overlaid with dynamic.kernel
};

struct BaselineSpec {
  int passes = 2;
  int line_budget = 12;
  int max_evaluations = 30;
};

struct BuildPriorSpec {
  std::optional<std::size_t> subsample;
  PriorTransform transform = PriorTransform::kNone;
  double constant = 0.0;
};

struct ExperimentConfig {
  std::string profile;
  olpc::ScenarioConfig scenario;
  olpc::ScenarioConfig prior_scenario;  // source network of surface priors
  olpc::UtilitySpec utility;
  std::uint64_t surface_seed = 7;
  LoopConfig loop;
  KernelSpec kernel;
  PriorSource prior;
  DynamicSpec dynamic;
  BaselineSpec baseline;
  BuildPriorSpec build_prior;
  std::vector<std::uint64_t> seeds;
  std::string resolved_json;  // compact dump of the merged configuration
};

// Built-in defaults for "small" (3 sites) and "paper" (7 sites).
std::string profile_defaults(std::string_view profile);

// "a..b" (inclusive) or a single integer.
std::vector<std::uint64_t> parse_seed_range(std::string_view text);

// Profile defaults overlaid with `config_text` (JSON object, may be empty).
// All failures are ConfigError.
ExperimentConfig parse_config(std::string_view config_text, std::string_view profile);

ExperimentConfig load_config(const std::optional<std::string>& path,
                             std::string_view profile,
                             const std::optional<std::string>& seeds);

}  // namespace bogp::exp
