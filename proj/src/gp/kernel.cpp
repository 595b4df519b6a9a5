#include "bogp/gp/kernel.hpp"

#include <cmath>
#include <numbers>

#include "bogp/errors.hpp"
#include "bogp/simd/kernels.hpp"

namespace bogp {

double matern_profile(double nu, double d) {
  if (d == 0.0) return 1.0;
  if (nu == 0.5) return std::exp(-d);
  if (nu == 1.5) {
    const double s = std::sqrt(3.0) * d;
    return (1.0 + s) * std::exp(-s);
  }
  if (nu == 2.5) {
    const double s = std::sqrt(5.0) * d;
    return (1.0 + s + 5.0 * d * d / 3.0) * std::exp(-s);
  }
  throw InvalidInput("Matern nu must be 0.5, 1.5 or 2.5");
}

double ess_factor(double period, double lengthscale, double lag) {
  const double r = std::fmod(std::abs(lag), period);
  const double s = std::sin(std::numbers::pi * r / period);
  return std::exp(-2.0 * s * s / (lengthscale * lengthscale));
}

namespace {

void check_point(const AugmentedPoint& p) {
  if (p.config.dim() == 0) throw InvalidInput("point has no coordinates");
  for (double c : p.config.coords)
    if (!std::isfinite(c)) throw InvalidInput("non-finite coordinate");
  if (!std::isfinite(p.time)) throw InvalidInput("non-finite time index");
}

double spatial_eval(const KernelSpec& spec, const ConfigPoint& x,
                    const ConfigPoint& y) {
  const HyperParams& hp = spec.params;
  const std::size_t k = x.dim();
  if (spec.spatial_family() == KernelFamily::kRbf) {
    double sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = x[i] - y[i];
      sq += d * d;
    }
    return hp.amplitude * std::exp(-sq / (2.0 * hp.rbf_scale * hp.rbf_scale));
  }
  if (hp.matern_lengthscales.size() != k)
    throw InvalidInput("Matern lengthscale count differs from dimension");
  double sq = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = (x[i] - y[i]) / hp.matern_lengthscales[i];
    sq += d * d;
  }
  return hp.amplitude * matern_profile(hp.matern_nu, std::sqrt(sq));
}

std::vector<double> pack(std::span<const AugmentedPoint> pts, std::size_t k) {
  std::vector<double> out;
  out.reserve(pts.size() * k);
  for (const auto& p : pts) {
    check_point(p);
    if (p.config.dim() != k) throw InvalidInput("dimension mismatch");
    out.insert(out.end(), p.config.coords.begin(), p.config.coords.end());
  }
  return out;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const AugmentedPoint& p,
                   const AugmentedPoint& q) {
  check_point(p);
  check_point(q);
  if (p.config.dim() != q.config.dim())
    throw InvalidInput("kernel_eval: dimension mismatch");
  const HyperParams& hp = spec.params;
  switch (spec.family) {
    case KernelFamily::kRbf:
    case KernelFamily::kMatern:
      return spatial_eval(spec, p.config, q.config);
    case KernelFamily::kExpSineSquared:
      return ess_factor(hp.ess_period, hp.ess_lengthscale, p.time - q.time);
    case KernelFamily::kProductSpaceTime:
      return spatial_eval(spec, p.config, q.config) *
             ess_factor(hp.ess_period, hp.ess_lengthscale, p.time - q.time);
  }
  throw InvalidInput("unknown kernel family");
}

Eigen::MatrixXd cross_covariance(const KernelSpec& spec,
                                 std::span<const AugmentedPoint> a,
                                 std::span<const AugmentedPoint> b) {
  const auto na = static_cast<Eigen::Index>(a.size());
  const auto nb = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd out(na, nb);
  if (na == 0 || nb == 0) return out;
  const HyperParams& hp = spec.params;
  const std::size_t k = a.front().config.dim();

  if (spec.family == KernelFamily::kExpSineSquared) {
    for (Eigen::Index i = 0; i < na; ++i)
      for (Eigen::Index j = 0; j < nb; ++j)
        out(i, j) = ess_factor(hp.ess_period, hp.ess_lengthscale,
                               a[i].time - b[j].time);
    return out;
  }

  const std::vector<double> pa = pack(a, k);
  const std::vector<double> pb = pack(b, k);
  std::vector<double> inv(k, 1.0);
  const bool rbf = spec.spatial_family() == KernelFamily::kRbf;
  if (!rbf) {
    if (hp.matern_lengthscales.size() != k)
      throw InvalidInput("Matern lengthscale count differs from dimension");
    for (std::size_t i = 0; i < k; ++i) inv[i] = 1.0 / hp.matern_lengthscales[i];
  }
  std::vector<double> sq(a.size() * b.size());
  simd::scaled_sq_distances(pa, pb, k, inv, sq);

  const double rbf_denominator = 2.0 * hp.rbf_scale * hp.rbf_scale;
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < nb; ++j) {
      const double d2 = sq[static_cast<std::size_t>(i * nb + j)];
      double v = rbf ? std::exp(-d2 / rbf_denominator)
                     : matern_profile(hp.matern_nu, std::sqrt(d2));
      v *= hp.amplitude;
      if (spec.family == KernelFamily::kProductSpaceTime)
        v *= ess_factor(hp.ess_period, hp.ess_lengthscale,
                        a[i].time - b[j].time);
      out(i, j) = v;
    }
  }
  return out;
}

Eigen::MatrixXd covariance_matrix(const KernelSpec& spec, double noise_std,
                                  std::span<const AugmentedPoint> pts) {
  if (pts.empty()) throw InvalidInput("covariance_matrix: no points");
  Eigen::MatrixXd c = cross_covariance(spec, pts, pts);
  c.diagonal().array() += noise_std * noise_std;
  return c;
}

}  // namespace bogp
