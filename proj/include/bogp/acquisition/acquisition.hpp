#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "bogp/gp/gaussian_process.hpp"
#include "bogp/gp/types.hpp"

namespace bogp {

enum class AcquisitionKind { kEI, kKG, kUCB };
enum class IncumbentRule { kBestNoisyObs, kBestPosteriorMean };

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::kEI;
  double ei_xi = 0.0;
  double ucb_beta = 1.0;
  // Optional per-iteration beta_n; the last entry repeats.
  std::vector<double> ucb_beta_schedule;
  int kg_fantasies = 128;
  IncumbentRule incumbent = IncumbentRule::kBestPosteriorMean;

  double beta_at(std::size_t n) const;
  void validate() const;
};

class FeasibleSet {
 public:
  enum class Kind { kDiscreteGrid, kBox };

  static FeasibleSet grid(std::vector<ConfigPoint> points);
  static FeasibleSet box(ConfigPoint lower, ConfigPoint upper);

  Kind kind() const { return kind_; }
  const std::vector<ConfigPoint>& points() const { return points_; }
  const ConfigPoint& lower() const { return lower_; }
  const ConfigPoint& upper() const { return upper_; }
  std::size_t dim() const;

 private:
  Kind kind_ = Kind::kDiscreteGrid;
  std::vector<ConfigPoint> points_;
  ConfigPoint lower_, upper_;
};

// Below this posterior std the EI takes its deterministic branch.
inline constexpr double kEiStdTolerance = 1e-12;

double normal_pdf(double z);
double normal_cdf(double z);

double ei_value(const PosteriorPrediction& pred, double incumbent, double xi);
double ucb_value(const PosteriorPrediction& pred, double beta);

// Monte-Carlo knowledge gradient of sampling `candidate`, with the inner
// maximization over a discrete grid evaluated at the candidate's time.
double kg_value(const GPDataset& dataset, const MeanPrior& prior,
                const KernelSpec& spec, const AugmentedPoint& candidate,
                const FeasibleSet& feasible, int fantasies, std::uint64_t seed);

// Reference value for improvement-based acquisitions.
double incumbent_value(const GaussianProcess& gp, IncumbentRule rule);

struct AcquisitionChoice {
  ConfigPoint point;
  // Position in the grid, or nullopt for a box search.
  std::optional<std::size_t> grid_index;
  double value = 0.0;
  PosteriorPrediction prediction;
};

struct AcquisitionContext {
  // Time index the next configuration will be deployed at (dynamic mode).
  std::optional<double> time_next;
  // Iteration number, selects beta_n.
  std::size_t iteration = 0;
  std::uint64_t seed = 0;
};

// Acquisition value at every grid point, in grid order.
std::vector<double> acquisition_on_grid(const GaussianProcess& gp,
                                        const AcquisitionSpec& acq,
                                        const FeasibleSet& feasible,
                                        const AcquisitionContext& ctx);

AcquisitionChoice maximize_acquisition(const GaussianProcess& gp,
                                       const AcquisitionSpec& acq,
                                       const FeasibleSet& feasible,
                                       const AcquisitionContext& ctx);

AcquisitionChoice maximize_acquisition(const GPDataset& dataset,
                                       const MeanPrior& prior,
                                       const KernelSpec& spec,
                                       const AcquisitionSpec& acq,
                                       const FeasibleSet& feasible,
                                       const AcquisitionContext& ctx);

}  // namespace bogp
