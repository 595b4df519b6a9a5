#include "bogp/acquisition/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "bogp/errors.hpp"
#include "bogp/gp/local_ascent.hpp"
#include "bogp/seeding.hpp"

namespace bogp {

double AcquisitionSpec::beta_at(std::size_t n) const {
  if (ucb_beta_schedule.empty()) return ucb_beta;
  return ucb_beta_schedule[std::min(n, ucb_beta_schedule.size() - 1)];
}

void AcquisitionSpec::validate() const {
  if (!(std::isfinite(ei_xi) && ei_xi >= 0.0))
    throw InvalidInput("EI xi must be >= 0");
  if (!(std::isfinite(ucb_beta) && ucb_beta >= 0.0))
    throw InvalidInput("UCB beta must be >= 0");
  for (double b : ucb_beta_schedule)
    if (!(std::isfinite(b) && b >= 0.0))
      throw InvalidInput("UCB beta schedule entries must be >= 0");
  if (kg_fantasies < 1) throw InvalidInput("KG needs at least one fantasy");
}

FeasibleSet FeasibleSet::grid(std::vector<ConfigPoint> points) {
  if (points.empty()) throw InvalidInput("feasible grid is empty");
  const std::size_t k = points.front().dim();
  if (k == 0) throw InvalidInput("feasible grid points have no coordinates");
  std::set<std::vector<double>> seen;
  for (const auto& p : points) {
    if (p.dim() != k) throw InvalidInput("feasible grid dimension mismatch");
    for (double c : p.coords)
      if (!std::isfinite(c)) throw InvalidInput("feasible grid point not finite");
    if (!seen.insert(p.coords).second)
      throw InvalidInput("feasible grid contains duplicate points");
  }
  FeasibleSet f;
  f.kind_ = Kind::kDiscreteGrid;
  f.points_ = std::move(points);
  return f;
}

FeasibleSet FeasibleSet::box(ConfigPoint lower, ConfigPoint upper) {
  if (lower.dim() == 0 || lower.dim() != upper.dim())
    throw InvalidInput("box bounds dimension mismatch");
  for (std::size_t i = 0; i < lower.dim(); ++i)
    if (!(std::isfinite(lower[i]) && std::isfinite(upper[i]) &&
          lower[i] < upper[i]))
      throw InvalidInput("box needs lower < upper in every dimension");
  FeasibleSet f;
  f.kind_ = Kind::kBox;
  f.lower_ = std::move(lower);
  f.upper_ = std::move(upper);
  return f;
}

std::size_t FeasibleSet::dim() const {
  return kind_ == Kind::kBox ? lower_.dim() : points_.front().dim();
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ei_value(const PosteriorPrediction& pred, double incumbent, double xi) {
  const double surplus = pred.mean - incumbent - xi;
  if (pred.std <= kEiStdTolerance) return std::max(surplus, 0.0);
  const double z = surplus / pred.std;
  const double v = surplus * normal_cdf(z) + pred.std * normal_pdf(z);
  return std::max(v, 0.0);
}

double ucb_value(const PosteriorPrediction& pred, double beta) {
  return pred.mean + beta * pred.std;
}

namespace {

std::vector<AugmentedPoint> grid_queries(const FeasibleSet& feasible,
                                         double time) {
  std::vector<AugmentedPoint> q;
  q.reserve(feasible.points().size());
  for (const auto& p : feasible.points()) q.push_back({p, time});
  return q;
}

// Antithetic pairs (z, -z), plus a 0 for odd m. The sample mean is exactly 0,
// so the estimate is >= 0 for every seed.
std::vector<double> standard_normals(std::uint64_t seed, int m) {
  std::mt19937_64 rng(derive_seed({seed, 0x4b47ULL}));
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> z;
  z.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i + 1 < m; i += 2) {
    const double v = nd(rng);
    z.push_back(v);
    z.push_back(-v);
  }
  if (m % 2 == 1) z.push_back(0.0);
  return z;
}

// KG of one candidate given the grid posterior. Updating the posterior mean
// with a fantasy observation y at c is exact and linear in y:
//   mu_new(x) = mu(x) + cov(x, c) / (s_c^2 + sigma^2) * (y - mu_c).
double kg_from_batch(const GaussianProcess& gp, const BatchPosterior& grid,
                     const std::vector<AugmentedPoint>& queries,
                     const AugmentedPoint& candidate,
                     const std::vector<double>& normals) {
  const PosteriorPrediction pc = gp.predict(candidate);
  const double sigma = gp.spec().params.noise_std;
  const double denom2 = pc.std * pc.std + sigma * sigma;
  if (denom2 <= 1e-24) return 0.0;
  const AugmentedPoint one[] = {candidate};
  Eigen::VectorXd cov = cross_covariance(gp.spec(), queries, one).col(0);
  if (!gp.dataset().empty()) {
    const Eigen::VectorXd vc = gp.whitened_cross(candidate);
    cov -= grid.whitened.transpose() * vc;
  }
  const Eigen::VectorXd b = cov / std::sqrt(denom2);
  const double current = grid.mean.maxCoeff();
  double acc = 0.0;
  for (double z : normals) acc += (grid.mean + b * z).maxCoeff() - current;
  return acc / static_cast<double>(normals.size());
}

}  // namespace

double kg_value(const GPDataset& dataset, const MeanPrior& prior,
                const KernelSpec& spec, const AugmentedPoint& candidate,
                const FeasibleSet& feasible, int fantasies, std::uint64_t seed) {
  if (feasible.kind() != FeasibleSet::Kind::kDiscreteGrid)
    throw UnsupportedFeasibleSet("KG is only defined over a discrete grid");
  if (fantasies < 1) throw InvalidInput("KG needs at least one fantasy");
  const GaussianProcess gp(dataset, prior, spec);
  const auto queries = grid_queries(feasible, candidate.time);
  const BatchPosterior batch = gp.predict_batch(queries);
  return kg_from_batch(gp, batch, queries, candidate,
                       standard_normals(seed, fantasies));
}

double incumbent_value(const GaussianProcess& gp, IncumbentRule rule) {
  const GPDataset& d = gp.dataset();
  if (d.empty()) return -std::numeric_limits<double>::infinity();
  if (rule == IncumbentRule::kBestNoisyObs)
    return *std::max_element(d.observations().begin(), d.observations().end());
  const BatchPosterior b = gp.predict_batch(d.points());
  return b.mean.maxCoeff();
}

std::vector<double> acquisition_on_grid(const GaussianProcess& gp,
                                        const AcquisitionSpec& acq,
                                        const FeasibleSet& feasible,
                                        const AcquisitionContext& ctx) {
  if (feasible.kind() != FeasibleSet::Kind::kDiscreteGrid)
    throw UnsupportedFeasibleSet("grid scan needs a discrete feasible set");
  acq.validate();
  const auto queries = grid_queries(feasible, ctx.time_next.value_or(0.0));
  const BatchPosterior batch = gp.predict_batch(queries);
  const std::size_t m = queries.size();
  std::vector<double> out(m);
  switch (acq.kind) {
    case AcquisitionKind::kEI: {
      double inc = incumbent_value(gp, acq.incumbent);
      if (gp.dataset().empty()) inc = batch.mean.maxCoeff();
      for (std::size_t i = 0; i < m; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out[i] = ei_value({batch.mean(ii), batch.std(ii)}, inc, acq.ei_xi);
      }
      break;
    }
    case AcquisitionKind::kUCB: {
      const double beta = acq.beta_at(ctx.iteration);
      for (std::size_t i = 0; i < m; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out[i] = ucb_value({batch.mean(ii), batch.std(ii)}, beta);
      }
      break;
    }
    case AcquisitionKind::kKG: {
      const auto normals = standard_normals(ctx.seed, acq.kg_fantasies);
      for (std::size_t i = 0; i < m; ++i)
        out[i] = kg_from_batch(gp, batch, queries, queries[i], normals);
      break;
    }
  }
  return out;
}

namespace {

AcquisitionChoice maximize_on_box(const GaussianProcess& gp,
                                  const AcquisitionSpec& acq,
                                  const FeasibleSet& feasible,
                                  const AcquisitionContext& ctx) {
  if (acq.kind == AcquisitionKind::kKG)
    throw UnsupportedFeasibleSet("KG is only defined over a discrete grid");
  constexpr int kStarts = 10;
  const std::size_t k = feasible.dim();
  const double time = ctx.time_next.value_or(0.0);
  double inc = incumbent_value(gp, acq.incumbent);
  const double beta = acq.beta_at(ctx.iteration);

  auto value_at = [&](std::span<const double> x) {
    const AugmentedPoint q{ConfigPoint(std::vector<double>(x.begin(), x.end())),
                           time};
    const PosteriorPrediction p = gp.predict(q);
    return acq.kind == AcquisitionKind::kEI ? ei_value(p, inc, acq.ei_xi)
                                            : ucb_value(p, beta);
  };
  if (gp.dataset().empty()) {
    std::vector<double> center(k);
    for (std::size_t i = 0; i < k; ++i)
      center[i] = 0.5 * (feasible.lower()[i] + feasible.upper()[i]);
    inc = gp.prior()(ConfigPoint(center));
  }

  std::vector<std::vector<double>> starts;
  std::mt19937_64 rng(derive_seed({ctx.seed, 0x424f58ULL}));
  for (int s = 0; s < kStarts; ++s) {
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_real_distribution<double> u(feasible.lower()[i],
                                               feasible.upper()[i]);
      x[i] = u(rng);
    }
    starts.push_back(std::move(x));
  }
  if (!gp.dataset().empty()) {
    const auto& obs = gp.dataset().observations();
    const auto best = static_cast<std::size_t>(
        std::max_element(obs.begin(), obs.end()) - obs.begin());
    starts.push_back(gp.dataset().points()[best].config.coords);
  }

  AscentOptions opts;
  opts.max_iterations = 100;
  opts.value_tolerance = 1e-6;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = feasible.upper()[i] - feasible.lower()[i];
    opts.fd_step.push_back(1e-6 * w);
    opts.max_step.push_back(0.25 * w);
  }
  AcquisitionChoice best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    AscentResult r = local_ascent(value_at, s, feasible.lower().coords,
                                  feasible.upper().coords, opts);
    if (r.value > best.value) {
      best.value = r.value;
      best.point = ConfigPoint(r.x);
    }
  }
  best.prediction = gp.predict({best.point, time});
  return best;
}

}  // namespace

AcquisitionChoice maximize_acquisition(const GaussianProcess& gp,
                                       const AcquisitionSpec& acq,
                                       const FeasibleSet& feasible,
                                       const AcquisitionContext& ctx) {
  if (feasible.kind() == FeasibleSet::Kind::kBox)
    return maximize_on_box(gp, acq, feasible, ctx);
  const std::vector<double> values = acquisition_on_grid(gp, acq, feasible, ctx);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[arg]) arg = i;
  AcquisitionChoice c;
  c.point = feasible.points()[arg];
  c.grid_index = arg;
  c.value = values[arg];
  c.prediction = gp.predict({c.point, ctx.time_next.value_or(0.0)});
  return c;
}

AcquisitionChoice maximize_acquisition(const GPDataset& dataset,
                                       const MeanPrior& prior,
                                       const KernelSpec& spec,
                                       const AcquisitionSpec& acq,
                                       const FeasibleSet& feasible,
                                       const AcquisitionContext& ctx) {
  return maximize_acquisition(GaussianProcess(dataset, prior, spec), acq,
                              feasible, ctx);
}

}  // namespace bogp
