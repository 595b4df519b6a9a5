#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "bogp/gp/types.hpp"
#include "bogp/olpc/simulator.hpp"

namespace bogp {

enum class PriorTransform { kNone, kMirror, kConstant };

struct PriorTable {
  BilinearGrid grid;  // x = alpha, y = p0
  std::optional<double> constant;  // set for constant priors
  std::string source;
  std::size_t sample_count = 0;

  void validate() const;
};

// Prior mean from a sampled surface. subsample_n keeps that many surface
// samples on an evenly spaced n_alpha x n_p0 subgrid (10 -> 2 x 5); a count
// with no such factorization is rounded down to the nearest one that has it.
PriorTable build_prior(const olpc::SurfaceTable& surface,
                       std::optional<std::size_t> subsample_n,
                       PriorTransform transform, double constant = 0.0,
                       std::string source = {});

// Grid priors become a clamped bilinear mean; constant priors a constant one.
MeanPrior prior_as_mean(const PriorTable& table);

// v -> (min + max) - v on every node.
BilinearGrid mirror(const BilinearGrid& g);

void write_prior_csv(std::ostream& os, const PriorTable& table,
                     const std::string& config_json = {});
PriorTable read_prior_csv(std::istream& is);

}  // namespace bogp
