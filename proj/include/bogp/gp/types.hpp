#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace bogp {

// A point of the feasible set. For OLPC: coords = (alpha, p0 [dBm]).
struct ConfigPoint {
  std::vector<double> coords;

  ConfigPoint() = default;
  explicit ConfigPoint(std::vector<double> c) : coords(std::move(c)) {}
  ConfigPoint(std::initializer_list<double> c) : coords(c) {}

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }

  friend bool operator==(const ConfigPoint&, const ConfigPoint&) = default;
};

// Configuration tagged with the time index it was (or will be) deployed at.
struct AugmentedPoint {
  ConfigPoint config;
  double time = 0.0;

  friend bool operator==(const AugmentedPoint&, const AugmentedPoint&) = default;
};

enum class KernelFamily { kRbf, kMatern, kExpSineSquared, kProductSpaceTime };

std::string_view family_name(KernelFamily f);

// Tunable parameters of every supported kernel. Fields that do not apply to
// the active family are carried along untouched.
struct HyperParams {
  // Signal variance. Multiplies RBF and Matern alike.
  double amplitude = 1.0;
  double rbf_scale = 1.0;
  // 0.5, 1.5 or 2.5.
  double matern_nu = 2.5;
  // One per configuration dimension.
  std::vector<double> matern_lengthscales;
  double ess_period = 1.0;
  double ess_lengthscale = 1.0;
  double noise_std = 0.0;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::kMatern;
  // Spatial child of a product kernel; must be kRbf or kMatern.
  KernelFamily spatial = KernelFamily::kMatern;
  HyperParams params;

  static KernelSpec rbf(double amplitude, double scale, double noise_std = 0.0);
  static KernelSpec matern(double nu, std::vector<double> lengthscales,
                           double amplitude = 1.0, double noise_std = 0.0);
  static KernelSpec ess(double period, double lengthscale);
  static KernelSpec product(const KernelSpec& spatial, double period,
                            double ess_lengthscale);

  KernelFamily spatial_family() const {
    return family == KernelFamily::kProductSpaceTime ? spatial : family;
  }
  bool has_time_factor() const {
    return family == KernelFamily::kProductSpaceTime ||
           family == KernelFamily::kExpSineSquared;
  }

  // Throws InvalidInput when any parameter violates its constraint.
  void validate() const;
};

// Rectilinear 2-D table with bilinear interpolation and edge clamping.
struct BilinearGrid {
  std::vector<double> x_nodes;  // strictly increasing, size >= 2
  std::vector<double> y_nodes;  // strictly increasing, size >= 2
  std::vector<double> values;   // x-major: values[ix * y_nodes.size() + iy]

  double at(std::size_t ix, std::size_t iy) const {
    return values[ix * y_nodes.size() + iy];
  }
  double interpolate(double x, double y) const;
  void validate() const;
};

class MeanPrior {
 public:
  enum class Kind { kConstant, kGridInterpolated };

  static MeanPrior constant(double c);
  static MeanPrior grid(BilinearGrid g);

  Kind kind() const { return kind_; }
  double constant_value() const { return constant_; }
  const BilinearGrid& table() const { return grid_; }

  double operator()(const ConfigPoint& x) const;
  double operator()(const AugmentedPoint& p) const { return (*this)(p.config); }

 private:
  Kind kind_ = Kind::kConstant;
  double constant_ = 0.0;
  BilinearGrid grid_;
};

// Observation record o(n), in insertion order.
class GPDataset {
 public:
  GPDataset() = default;

  void add(AugmentedPoint p, double observation);
  void add(ConfigPoint x, double observation) {
    add(AugmentedPoint{std::move(x), 0.0}, observation);
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::size_t dim() const { return dim_; }

  const std::vector<AugmentedPoint>& points() const { return points_; }
  const std::vector<double>& observations() const { return obs_; }

  // Dataset made of the last `n` entries.
  GPDataset tail(std::size_t n) const;

 private:
  std::vector<AugmentedPoint> points_;
  std::vector<double> obs_;
  std::size_t dim_ = 0;
};

struct PosteriorPrediction {
  double mean = 0.0;
  double std = 0.0;
};

}  // namespace bogp
