#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bogp/engine/bo_engine.hpp"
#include "bogp/gp/types.hpp"

namespace bogp {

inline constexpr double kGoldenRatio = 0.6180339887498949;  // (sqrt(5) - 1) / 2

// One search coordinate: a continuous range, optionally restricted to a sorted
// set of allowed values that probes snap to.
struct GSSAxis {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;

  double snap(double v) const;
  // Smallest spacing of the allowed values, or 0 for a continuous axis.
  double step() const;
  void validate() const;
};

struct GSSState {
  std::size_t coordinate = 0;
  double lo = 0.0, hi = 0.0;
  double probe_low = 0.0, probe_high = 0.0;  // hi - g(hi-lo), lo + g(hi-lo)
  int pass = 0;
};

struct LineSearchResult {
  double best_x = 0.0;
  double best_value = 0.0;
  std::vector<GSSState> brackets;  // after each reduction
  int evaluations = 0;             // distinct (snapped) probes evaluated
};

// Golden-section maximization on [axis.lo, axis.hi] until the bracket is
// narrower than tol or `budget` distinct probes have been evaluated.
// Snapped probes that coincide reuse the earlier value.
LineSearchResult golden_section(const std::function<double(double)>& f,
                                const GSSAxis& axis, double tol, int budget);

struct GSSOptions {
  int passes = 2;
  std::vector<double> tol;  // per coordinate; empty = one grid step
  int line_budget = 12;
  int max_evaluations = 30;  // start point included
  std::vector<std::size_t> order;  // coordinate order; empty = last first
  std::uint64_t seed = 0;
};

struct GSSEvaluation {
  std::size_t step = 0;  // 1-based, shared numbering with the BO loop
  ConfigPoint point;
  double observed = 0.0;
  std::size_t coordinate = 0;
  int pass = 0;
  std::size_t line = 0;  // 0 for the start point
};

struct GSSResult {
  std::vector<GSSEvaluation> history;
  ConfigPoint best;
  double best_value = 0.0;
  // Step of the first evaluation of every line search after the first one.
  std::vector<std::size_t> switch_steps;
  bool aborted = false;
  std::string abort_reason;
};

// Coordinate descent with a golden-section line search per coordinate, from
// a seeded random start on the axes.
GSSResult cd_gss(const ObjectiveHandle& objective, const std::vector<GSSAxis>& axes,
                 const GSSOptions& opts);

}  // namespace bogp
