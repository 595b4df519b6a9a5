#include "bogp/gp/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bogp/errors.hpp"

namespace bogp {

std::string_view family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::kRbf:
      return "rbf";
    case KernelFamily::kMatern:
      return "matern";
    case KernelFamily::kExpSineSquared:
      return "ess";
    case KernelFamily::kProductSpaceTime:
      return "product";
  }
  return "unknown";
}

KernelSpec KernelSpec::rbf(double amplitude, double scale, double noise_std) {
  KernelSpec s;
  s.family = KernelFamily::kRbf;
  s.params.amplitude = amplitude;
  s.params.rbf_scale = scale;
  s.params.noise_std = noise_std;
  return s;
}

KernelSpec KernelSpec::matern(double nu, std::vector<double> lengthscales,
                              double amplitude, double noise_std) {
  KernelSpec s;
  s.family = KernelFamily::kMatern;
  s.params.matern_nu = nu;
  s.params.matern_lengthscales = std::move(lengthscales);
  s.params.amplitude = amplitude;
  s.params.noise_std = noise_std;
  return s;
}

KernelSpec KernelSpec::ess(double period, double lengthscale) {
  KernelSpec s;
  s.family = KernelFamily::kExpSineSquared;
  s.params.ess_period = period;
  s.params.ess_lengthscale = lengthscale;
  return s;
}

KernelSpec KernelSpec::product(const KernelSpec& spatial, double period,
                               double ess_lengthscale) {
  KernelSpec s = spatial;
  s.family = KernelFamily::kProductSpaceTime;
  s.spatial = spatial.family;
  s.params.ess_period = period;
  s.params.ess_lengthscale = ess_lengthscale;
  return s;
}

namespace {
bool positive(double v) { return std::isfinite(v) && v > 0.0; }
}  // namespace

void KernelSpec::validate() const {
  const HyperParams& p = params;
  if (!(std::isfinite(p.noise_std) && p.noise_std >= 0.0))
    throw InvalidInput("noise_std must be finite and >= 0");
  const KernelFamily sf = spatial_family();
  if (family == KernelFamily::kProductSpaceTime &&
      sf != KernelFamily::kRbf && sf != KernelFamily::kMatern) {
    throw InvalidInput("product kernel needs an RBF or Matern spatial child");
  }
  if (sf == KernelFamily::kRbf) {
    if (!positive(p.amplitude) || !positive(p.rbf_scale))
      throw InvalidInput("RBF amplitude and scale must be > 0");
  }
  if (sf == KernelFamily::kMatern) {
    if (!positive(p.amplitude)) throw InvalidInput("amplitude must be > 0");
    if (p.matern_nu != 0.5 && p.matern_nu != 1.5 && p.matern_nu != 2.5)
      throw InvalidInput("Matern nu must be 0.5, 1.5 or 2.5");
    if (p.matern_lengthscales.empty())
      throw InvalidInput("Matern needs one lengthscale per dimension");
    for (double l : p.matern_lengthscales)
      if (!positive(l)) throw InvalidInput("Matern lengthscales must be > 0");
  }
  if (has_time_factor()) {
    if (!positive(p.ess_period) || !positive(p.ess_lengthscale))
      throw InvalidInput("ESS period and lengthscale must be > 0");
  }
}

void BilinearGrid::validate() const {
  if (x_nodes.size() < 2 || y_nodes.size() < 2)
    throw InvalidInput("bilinear grid needs at least 2x2 nodes");
  if (values.size() != x_nodes.size() * y_nodes.size())
    throw InvalidInput("bilinear grid value count mismatch");
  auto increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) return false;
    return true;
  };
  if (!increasing(x_nodes) || !increasing(y_nodes))
    throw InvalidInput("bilinear grid nodes must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidInput("bilinear grid value not finite");
}

namespace {

// Cell index and local coordinate in [0, 1], clamped to the node range.
// Returns t exactly 0 or 1 at nodes.
std::pair<std::size_t, double> locate(const std::vector<double>& nodes,
                                      double v) {
  const std::size_t last = nodes.size() - 1;
  if (v <= nodes.front()) return {0, 0.0};
  if (v >= nodes.back()) return {last - 1, 1.0};
  auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
  std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
  std::size_t lo = hi - 1;
  return {lo, (v - nodes[lo]) / (nodes[hi] - nodes[lo])};
}

}  // namespace

double BilinearGrid::interpolate(double x, double y) const {
  auto [ix, tx] = locate(x_nodes, x);
  auto [iy, ty] = locate(y_nodes, y);
  const double v00 = at(ix, iy);
  const double v01 = at(ix, iy + 1);
  const double v10 = at(ix + 1, iy);
  const double v11 = at(ix + 1, iy + 1);
  const double lo = v00 * (1.0 - ty) + v01 * ty;
  const double hi = v10 * (1.0 - ty) + v11 * ty;
  return lo * (1.0 - tx) + hi * tx;
}

MeanPrior MeanPrior::constant(double c) {
  if (!std::isfinite(c)) throw InvalidInput("constant prior must be finite");
  MeanPrior m;
  m.kind_ = Kind::kConstant;
  m.constant_ = c;
  return m;
}

MeanPrior MeanPrior::grid(BilinearGrid g) {
  g.validate();
  MeanPrior m;
  m.kind_ = Kind::kGridInterpolated;
  m.grid_ = std::move(g);
  return m;
}

double MeanPrior::operator()(const ConfigPoint& x) const {
  if (kind_ == Kind::kConstant) return constant_;
  if (x.dim() != 2)
    throw InvalidInput("grid-interpolated prior is defined on 2-D points");
  return grid_.interpolate(x[0], x[1]);
}

void GPDataset::add(AugmentedPoint p, double observation) {
  if (p.config.dim() == 0) throw InvalidInput("point has no coordinates");
  for (double c : p.config.coords)
    if (!std::isfinite(c)) throw InvalidInput("point coordinate not finite");
  if (!std::isfinite(p.time) || p.time < 0.0)
    throw InvalidInput("time index must be finite and >= 0");
  if (!std::isfinite(observation)) throw InvalidInput("observation not finite");
  if (!points_.empty()) {
    if (p.config.dim() != dim_)
      throw InvalidInput("point dimension differs from the dataset");
    if (p.time < points_.back().time)
      throw InvalidInput("time index must be non-decreasing");
  }
  dim_ = p.config.dim();
  points_.push_back(std::move(p));
  obs_.push_back(observation);
}

GPDataset GPDataset::tail(std::size_t n) const {
  if (n >= size()) return *this;
  GPDataset out;
  for (std::size_t i = size() - n; i < size(); ++i) out.add(points_[i], obs_[i]);
  return out;
}

}  // namespace bogp
