#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "bogp/gp/types.hpp"

namespace bogp {

// Half-integer Matern profile as a function of the scaled distance d.
double matern_profile(double nu, double d);

// Exp-Sine-Squared factor for a time lag. Exactly 1 for lags that are
// integer multiples of the period.
double ess_factor(double period, double lengthscale, double lag);

// K(p, q) without observation noise.
double kernel_eval(const KernelSpec& spec, const AugmentedPoint& p,
                   const AugmentedPoint& q);

// Sigma_o: kernel matrix plus noise_std^2 added on the index diagonal.
Eigen::MatrixXd covariance_matrix(const KernelSpec& spec, double noise_std,
                                  std::span<const AugmentedPoint> pts);

// K(a_i, b_j) for all pairs, computed through the SIMD distance kernel.
Eigen::MatrixXd cross_covariance(const KernelSpec& spec,
                                 std::span<const AugmentedPoint> a,
                                 std::span<const AugmentedPoint> b);

}  // namespace bogp
