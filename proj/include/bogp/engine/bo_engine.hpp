#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bogp/acquisition/acquisition.hpp"
#include "bogp/gp/gaussian_process.hpp"
#include "bogp/gp/types.hpp"

namespace bogp {

enum class LoopMode { kStatic, kDynamic };

struct LoopConfig {
  AcquisitionSpec acq;
  double termination_epsilon = 0.0;
  int max_steps = 30;  // total evaluations, initialization included
  int refit_every = 1;
  int fit_restarts = 3;  // 0 keeps the hyperparameters fixed
  FitOptions fit;
  // Observations kept for inference; nullopt = all of them.
  std::optional<std::size_t> window_size;
  std::uint64_t seed = 0;
  LoopMode mode = LoopMode::kStatic;

  void validate(const KernelSpec& spec) const;
};

// Window used when a config leaves window_size unset.
std::optional<std::size_t> default_window(LoopMode mode);

struct IterationRecord {
  std::size_t step = 0;  // 1-based
  ConfigPoint point;
  double time = 0.0;
  double observed = 0.0;
  PosteriorPrediction predicted;  // before the observation was added
  double acq_value = 0.0;         // NaN for the initialization step
  HyperParams params;
  std::size_t solve_size = 0;
  double wall_seconds = 0.0;
};

// f~(x) at a given step. Must be deterministic in (point, step) for a run.
using ObjectiveHandle =
    std::function<double(const ConfigPoint& point, std::size_t step)>;

struct RunResult {
  ConfigPoint best;
  double best_value = 0.0;
  std::vector<IterationRecord> history;
  bool aborted = false;
  std::string abort_reason;
  int fit_failures = 0;
};

RunResult run_static(const ObjectiveHandle& objective, const MeanPrior& prior,
                     const KernelSpec& spec, const LoopConfig& loop,
                     const FeasibleSet& feasible);

// Time index t_n = n. The search runs at the time of the next deployment.
RunResult run_dynamic(const ObjectiveHandle& objective, const MeanPrior& prior,
                      const KernelSpec& spec, const LoopConfig& loop,
                      const FeasibleSet& feasible);

// True iff the best acquisition value over the feasible set is below epsilon,
// or more than max_steps evaluations have been made.
bool should_terminate(std::size_t steps_done, const GPDataset& dataset,
                      const MeanPrior& prior, const KernelSpec& spec,
                      const AcquisitionSpec& acq, const FeasibleSet& feasible,
                      double epsilon, int max_steps,
                      const AcquisitionContext& ctx = {});

// Highest observed value so far, per step.
std::vector<double> incumbent_trace(const std::vector<IterationRecord>& history);

struct ExplorationStats {
  double min_utility = 0.0;
  double fraction_below = 0.0;
};

ExplorationStats exploration_stats(const std::vector<IterationRecord>& history,
                                   double threshold);

}  // namespace bogp
