#include "bogp/gp/gaussian_process.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "bogp/errors.hpp"
#include "bogp/gp/local_ascent.hpp"
#include "bogp/seeding.hpp"

namespace bogp {
namespace {

constexpr std::array<double, 6> kJitterLadder = {0.0,  1e-10, 1e-9,
                                                 1e-8, 1e-7,  1e-6};
// A pivot this small relative to the mean diagonal counts as a failed
// factorization and triggers the next jitter level.
constexpr double kMinRelativePivot = 1e-14;

}  // namespace

GaussianProcess::GaussianProcess(GPDataset data, MeanPrior prior,
                                 KernelSpec spec)
    : data_(std::move(data)), prior_(std::move(prior)), spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t n = data_.size();
  if (n == 0) return;

  const auto& pts = data_.points();
  Eigen::MatrixXd sigma = covariance_matrix(spec_, spec_.params.noise_std, pts);
  const auto ni = static_cast<Eigen::Index>(n);
  resid_.resize(ni);
  for (std::size_t i = 0; i < n; ++i)
    resid_(static_cast<Eigen::Index>(i)) =
        data_.observations()[i] - prior_(pts[i]);

  const double mean_diag = sigma.diagonal().mean();
  for (double lambda : kJitterLadder) {
    Eigen::MatrixXd m = sigma;
    if (lambda > 0.0) m.diagonal().array() += lambda * mean_diag;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd l = llt.matrixL();
    const double min_pivot = l.diagonal().minCoeff();
    if (!(min_pivot * min_pivot >= kMinRelativePivot * mean_diag)) continue;
    if (!l.allFinite()) continue;
    chol_ = std::move(l);
    jitter_ = lambda;
    alpha_ = llt.solve(resid_);
    log_det_half_ = chol_.diagonal().array().log().sum();
    return;
  }
  throw IllConditionedCovariance(
      "Cholesky of the observation covariance failed after jitter " +
      std::to_string(kJitterLadder.back()));
}

Eigen::VectorXd GaussianProcess::whitened_cross(const AugmentedPoint& q) const {
  const AugmentedPoint one[] = {q};
  Eigen::VectorXd k = cross_covariance(spec_, data_.points(), one).col(0);
  return chol_.triangularView<Eigen::Lower>().solve(k);
}

PosteriorPrediction GaussianProcess::predict(const AugmentedPoint& query) const {
  const AugmentedPoint one[] = {query};
  BatchPosterior b = predict_batch(one);
  return {b.mean(0), b.std(0)};
}

BatchPosterior GaussianProcess::predict_batch(
    std::span<const AugmentedPoint> queries) const {
  const auto m = static_cast<Eigen::Index>(queries.size());
  BatchPosterior out;
  out.mean.resize(m);
  out.std.resize(m);
  out.prior_var.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    out.mean(j) = prior_(queries[static_cast<std::size_t>(j)]);
    const auto& q = queries[static_cast<std::size_t>(j)];
    out.prior_var(j) = kernel_eval(spec_, q, q);
  }
  if (data_.empty()) {
    out.std = out.prior_var.array().max(0.0).sqrt();
    out.whitened.resize(0, m);
    return out;
  }
  if (!queries.empty() && queries.front().config.dim() != data_.dim())
    throw InvalidInput("query dimension differs from the dataset");
  const Eigen::MatrixXd k = cross_covariance(spec_, data_.points(), queries);
  out.mean += k.transpose() * alpha_;
  out.whitened = chol_.triangularView<Eigen::Lower>().solve(k);
  const Eigen::VectorXd reduction = out.whitened.colwise().squaredNorm();
  out.std = (out.prior_var - reduction).array().max(0.0).sqrt();
  return out;
}

double GaussianProcess::log_marginal_likelihood() const {
  if (data_.empty()) throw InvalidInput("log marginal likelihood of no data");
  const double n = static_cast<double>(data_.size());
  return -0.5 * resid_.dot(alpha_) - log_det_half_ -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

PosteriorPrediction posterior_predict(const GPDataset& dataset,
                                      const MeanPrior& prior,
                                      const KernelSpec& spec,
                                      const AugmentedPoint& query) {
  return GaussianProcess(dataset, prior, spec).predict(query);
}

double log_marginal_likelihood(const GPDataset& dataset, const MeanPrior& prior,
                               const KernelSpec& spec) {
  return GaussianProcess(dataset, prior, spec).log_marginal_likelihood();
}

// ---------------------------------------------------------------------------
// Hyperparameter fitting

double ParamSlot::get(const HyperParams& hp) const {
  switch (kind) {
    case Kind::kAmplitude:
      return hp.amplitude;
    case Kind::kRbfScale:
      return hp.rbf_scale;
    case Kind::kLengthscale:
      return hp.matern_lengthscales.at(index);
    case Kind::kEssLengthscale:
      return hp.ess_lengthscale;
    case Kind::kEssPeriod:
      return hp.ess_period;
    case Kind::kNoise:
      return hp.noise_std;
  }
  return 0.0;
}

void ParamSlot::set(HyperParams& hp, double v) const {
  switch (kind) {
    case Kind::kAmplitude:
      hp.amplitude = v;
      return;
    case Kind::kRbfScale:
      hp.rbf_scale = v;
      return;
    case Kind::kLengthscale:
      hp.matern_lengthscales.at(index) = v;
      return;
    case Kind::kEssLengthscale:
      hp.ess_lengthscale = v;
      return;
    case Kind::kEssPeriod:
      hp.ess_period = v;
      return;
    case Kind::kNoise:
      hp.noise_std = v;
      return;
  }
}

std::uint64_t ParamSlot::stable_id() const {
  switch (kind) {
    case Kind::kAmplitude:
      return 1;
    case Kind::kRbfScale:
      return 2;
    case Kind::kLengthscale:
      return 10 + index;
    case Kind::kEssLengthscale:
      return 500;
    case Kind::kEssPeriod:
      return 501;
    case Kind::kNoise:
      return 600;
  }
  return 0;
}

std::vector<ParamSlot> free_parameters(const KernelSpec& spec,
                                       const FitOptions& opts) {
  using K = ParamSlot::Kind;
  std::vector<ParamSlot> slots;
  if (spec.family != KernelFamily::kExpSineSquared) {
    if (opts.fit_amplitude) slots.push_back({K::kAmplitude});
    if (spec.spatial_family() == KernelFamily::kRbf) {
      slots.push_back({K::kRbfScale});
    } else {
      for (std::size_t i = 0; i < spec.params.matern_lengthscales.size(); ++i)
        slots.push_back({K::kLengthscale, i});
    }
  }
  if (spec.has_time_factor()) {
    slots.push_back({K::kEssLengthscale});
    if (opts.fit_period) slots.push_back({K::kEssPeriod});
  }
  if (opts.fit_noise && spec.params.noise_std > 0.0) slots.push_back({K::kNoise});
  return slots;
}

FitBounds default_fit_bounds(const KernelSpec& reference,
                             const GPDataset& dataset, const MeanPrior& prior,
                             const FitOptions& opts) {
  FitBounds b;
  b.slots = free_parameters(reference, opts);
  const auto& obs = dataset.observations();
  const double n = static_cast<double>(std::max<std::size_t>(obs.size(), 1));
  double mean = 0.0, msr = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    mean += obs[i];
    const double r = obs[i] - prior(dataset.points()[i]);
    msr += r * r;
  }
  mean /= n;
  msr /= n;
  double var = 0.0;
  for (double o : obs) var += (o - mean) * (o - mean);
  var /= n;
  double obs_std = std::sqrt(var);
  if (!(obs_std > 0.0)) obs_std = std::sqrt(msr);
  if (!(obs_std > 0.0)) obs_std = reference.params.noise_std;
  if (!(msr > 0.0)) msr = reference.params.amplitude;

  using K = ParamSlot::Kind;
  for (const ParamSlot& s : b.slots) {
    double lo = 0.0, hi = 0.0;
    const double ref = s.get(reference.params);
    switch (s.kind) {
      case K::kAmplitude:
        lo = 1e-2 * msr;
        hi = 1e2 * msr;
        break;
      case K::kNoise:
        lo = 1e-4 * obs_std;
        hi = 10.0 * obs_std;
        break;
      default:
        lo = 1e-2 * ref;
        hi = 1e3 * ref;
        break;
    }
    b.log_lower.push_back(std::log(lo));
    b.log_upper.push_back(std::log(hi));
  }
  return b;
}

HyperParams fit_hyperparameters(const GPDataset& dataset,
                                const MeanPrior& prior, const KernelSpec& spec,
                                const FitBounds& bounds, int restarts,
                                std::uint64_t seed) {
  if (restarts <= 0) return spec.params;
  if (dataset.size() < 2)
    throw InvalidInput("hyperparameter fitting needs at least 2 observations");
  const std::size_t p = bounds.slots.size();
  if (bounds.log_lower.size() != p || bounds.log_upper.size() != p)
    throw InvalidInput("fit bounds do not match the parameter slots");
  if (p == 0) return spec.params;

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto params_at = [&](std::span<const double> logv) {
    HyperParams hp = spec.params;
    for (std::size_t i = 0; i < p; ++i) bounds.slots[i].set(hp, std::exp(logv[i]));
    return hp;
  };
  auto lml_of = [&](const HyperParams& hp) {
    KernelSpec s = spec;
    s.params = hp;
    try {
      return log_marginal_likelihood(dataset, prior, s);
    } catch (const IllConditionedCovariance&) {
      return kNegInf;
    } catch (const InvalidInput&) {
      return kNegInf;
    }
  };
  auto objective = [&](std::span<const double> logv) {
    return lml_of(params_at(logv));
  };

  HyperParams best = spec.params;
  double best_value = lml_of(best);

  AscentOptions opts;
  opts.max_iterations = 60;
  opts.value_tolerance = 1e-10;
  opts.fd_step.assign(p, 1e-5);
  opts.max_step.assign(p, 2.0);

  bool any_success = best_value > kNegInf;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> x0(p);
    for (std::size_t i = 0; i < p; ++i) {
      if (r == 0) {
        const double v = bounds.slots[i].get(spec.params);
        x0[i] = v > 0.0 ? std::log(v) : bounds.log_lower[i];
      } else {
        std::mt19937_64 rng(derive_seed(
            {seed, static_cast<std::uint64_t>(r), bounds.slots[i].stable_id()}));
        std::uniform_real_distribution<double> u(bounds.log_lower[i],
                                                 bounds.log_upper[i]);
        x0[i] = u(rng);
      }
    }
    AscentResult res =
        local_ascent(objective, x0, bounds.log_lower, bounds.log_upper, opts);
    if (res.value == kNegInf) continue;
    any_success = true;
    if (res.value > best_value) {
      best_value = res.value;
      best = params_at(res.x);
    }
  }
  if (!any_success) throw FittingFailed("no hyperparameter start could be evaluated");
  return best;
}

}  // namespace bogp
