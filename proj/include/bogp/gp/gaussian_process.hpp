#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "bogp/gp/kernel.hpp"
#include "bogp/gp/types.hpp"

namespace bogp {

// Batch prediction with the whitened cross-covariance kept around, so callers
// can form posterior covariances with further points (KG fantasies).
struct BatchPosterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  Eigen::VectorXd prior_var;  // C(x, x) of the latent function
  Eigen::MatrixXd whitened;   // L^{-1} K(X_obs, x), n x m
};

// Exact GP conditioned on a dataset. The observation covariance is factored
// once at construction (Cholesky, with jitter escalation on failure).
class GaussianProcess {
 public:
  GaussianProcess(GPDataset data, MeanPrior prior, KernelSpec spec);

  PosteriorPrediction predict(const AugmentedPoint& query) const;
  BatchPosterior predict_batch(std::span<const AugmentedPoint> queries) const;

  double log_marginal_likelihood() const;

  const GPDataset& dataset() const { return data_; }
  const MeanPrior& prior() const { return prior_; }
  const KernelSpec& spec() const { return spec_; }
  // Lambda actually added (times mean diagonal); 0 when none was needed.
  double jitter() const { return jitter_; }
  std::size_t solve_size() const { return data_.size(); }

  // L^{-1} K(X_obs, q)
  Eigen::VectorXd whitened_cross(const AugmentedPoint& q) const;

 private:
  GPDataset data_;
  MeanPrior prior_;
  KernelSpec spec_;
  Eigen::MatrixXd chol_;   // lower factor L
  Eigen::VectorXd alpha_;  // Sigma_o^{-1} (o - mu_o)
  Eigen::VectorXd resid_;  // o - mu_o
  double log_det_half_ = 0.0;
  double jitter_ = 0.0;
};

PosteriorPrediction posterior_predict(const GPDataset& dataset,
                                      const MeanPrior& prior,
                                      const KernelSpec& spec,
                                      const AugmentedPoint& query);

double log_marginal_likelihood(const GPDataset& dataset, const MeanPrior& prior,
                               const KernelSpec& spec);

// Which hyperparameter a slot of the fitting vector refers to.
struct ParamSlot {
  enum class Kind {
    kAmplitude,
    kRbfScale,
    kLengthscale,
    kEssLengthscale,
    kEssPeriod,
    kNoise
  };
  Kind kind;
  std::size_t index = 0;  // lengthscale dimension

  double get(const HyperParams& hp) const;
  void set(HyperParams& hp, double v) const;
  // Identifier independent of which other slots are present; seeds the
  // restart draws so adding a parameter does not perturb the others.
  std::uint64_t stable_id() const;
};

struct FitOptions {
  bool fit_amplitude = true;
  bool fit_noise = true;  // ignored when the incoming noise_std is 0
  bool fit_period = false;
};

// Box in log-parameter space, one entry per slot.
struct FitBounds {
  std::vector<ParamSlot> slots;
  std::vector<double> log_lower;
  std::vector<double> log_upper;
};

std::vector<ParamSlot> free_parameters(const KernelSpec& spec,
                                       const FitOptions& opts = {});

// Lengthscales (and ESS lengthscale / period) within [1e-2, 1e3] x their
// reference values; noise within [1e-4, 10] x the observation std; amplitude
// within [1e-2, 1e2] x the mean squared prior residual.
FitBounds default_fit_bounds(const KernelSpec& reference,
                             const GPDataset& dataset, const MeanPrior& prior,
                             const FitOptions& opts = {});

// Multistart local ascent of the log marginal likelihood in log space. The
// first start is the incoming parameters; the result never has a lower
// likelihood than they do.
HyperParams fit_hyperparameters(const GPDataset& dataset,
                                const MeanPrior& prior, const KernelSpec& spec,
                                const FitBounds& bounds, int restarts,
                                std::uint64_t seed);

}  // namespace bogp
