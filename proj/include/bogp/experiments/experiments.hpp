#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bogp/baselines/cd_gss.hpp"
#include "bogp/baselines/priors.hpp"
#include "bogp/engine/bo_engine.hpp"
#include "bogp/experiments/config.hpp"
#include "bogp/olpc/simulator.hpp"

namespace bogp::exp {

// The 912-point OLPC grid as a feasible set, grid order.
FeasibleSet olpc_feasible_set();
std::vector<GSSAxis> olpc_axes();

// f~ at step n: one sampling period with period seed derived from
// (run_seed, n). With a load schedule, K at step n is schedule[(n-1) % len].
ObjectiveHandle make_objective(const olpc::NetworkScenario& scenario,
                               const olpc::UtilitySpec& utility, std::uint64_t run_seed,
                               std::vector<int> load_schedule = {});

// Exhaustive surfaces at r = 0, 1, 2 for a scenario, common seed.
std::vector<olpc::SurfaceTable> compute_surfaces(const olpc::NetworkScenario& scenario,
                                                 const olpc::UtilitySpec& utility,
                                                 std::uint64_t seed);

// Prior source surface from the smaller network, at the configured r.
PriorTable build_prior_table(const ExperimentConfig& cfg,
                             std::optional<std::size_t> subsample,
                             PriorTransform transform, double constant = 0.0);
MeanPrior resolve_prior(const ExperimentConfig& cfg);

struct SurfaceRange {
  double min = 0.0, max = 0.0;
  olpc::OLPCConfig argmax;
};
SurfaceRange surface_range(const olpc::SurfaceTable& t);

// (x - min) / (max - min)
std::vector<double> fraction_of_optimum(const std::vector<double>& values,
                                        const SurfaceRange& range);
std::vector<double> running_max(const std::vector<double>& values);

struct Row {
  std::size_t step = 0;
  double alpha = 0.0, p0 = 0.0;
  double utility = 0.0;
  double post_mean = 0.0, post_std = 0.0, acq_value = 0.0;  // NaN if none
  int load = 0;
};

struct SeedTrace {
  std::uint64_t seed = 0;
  std::vector<Row> rows;
  std::vector<double> incumbent;
  std::vector<double> fraction;
  olpc::OLPCConfig best;
  double best_value = 0.0;
  double min_utility = 0.0;
  std::vector<std::size_t> switch_steps;  // CD-GSS only
  int fit_failures = 0;
  bool aborted = false;
  std::string abort_reason;
  double wall_seconds = 0.0;
};

struct Outcome {
  std::string command;
  SurfaceRange range;
  std::map<std::string, std::vector<SeedTrace>> variants;  // name -> per seed
  bool any_aborted() const;
};

Outcome run_optimize(const ExperimentConfig& cfg);
Outcome run_baseline(const ExperimentConfig& cfg);
// Variants "D=<period>" for every configured period plus "parallel_static".
Outcome run_dynamic_experiment(const ExperimentConfig& cfg);

// Per-step statistics across seeds.
struct Band {
  std::vector<double> median, q025, q975, mean, ci_low, ci_high;
  std::vector<std::size_t> count;
};
Band aggregate(const std::vector<std::vector<double>>& traces);

// Outputs. CSVs start with "# schema:" and "# config:" lines.
void write_surface_csv(std::ostream& os, const std::vector<olpc::SurfaceTable>& tables,
                       const std::string& config_json);
std::string surface_summary_json(const std::vector<olpc::SurfaceTable>& tables,
                                 const std::string& config_json);
void write_trace_csv(std::ostream& os, const SeedTrace& t, const std::string& schema,
                     const std::string& config_json, bool with_load);
std::string outcome_summary_json(const Outcome& o, const std::string& config_json);

}  // namespace bogp::exp
