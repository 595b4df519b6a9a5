#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bogp {

struct AscentOptions {
  int max_iterations = 100;
  // Stop when one accepted step improves the value by less than this
  // (relative to 1 + |f|).
  double value_tolerance = 1e-9;
  // Finite-difference step, per coordinate.
  std::vector<double> fd_step;
  // Largest move of a single step along any coordinate.
  std::vector<double> max_step;
};

struct AscentResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

// Box-constrained quasi-Newton (projected BFGS) maximization with
// finite-difference gradients. `f` may return -inf or NaN to reject a point.
// A rejected start comes back unchanged with value -inf.
AscentResult local_ascent(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> x0, std::span<const double> lower,
                          std::span<const double> upper,
                          const AscentOptions& opts);

}  // namespace bogp
