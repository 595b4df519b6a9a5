#pragma once
// Random GP regression instances paired with their oracle description.

#include <algorithm>
#include <cmath>
#include <random>

#include "bogp/gp/gaussian_process.hpp"
#include "oracles.hpp"

namespace testing_support {

using namespace bogp;

inline AugmentedPoint ap(std::vector<double> x, double t = 0.0) { return {ConfigPoint(std::move(x)), t}; }

struct Instance {
  oracle::Kern ok;
  KernelSpec spec;
  double sigma;
  std::vector<oracle::Pt> X;
  std::vector<double> y;
  oracle::Pt q;
};

inline Instance random_instance(std::mt19937_64& rng, std::size_t n, int family) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance in;
  const std::size_t dim = 2;
  in.sigma = 0.5 * u(rng);
  in.ok.family = family;
  in.ok.amp = 0.5 + 2 * u(rng);
  in.ok.rbf_b = 0.2 + u(rng);
  const double nus[] = {0.5, 1.5, 2.5};
  in.ok.nu = nus[rng() % 3];
  in.ok.ell = {0.2 + u(rng), 0.2 + u(rng)};
  in.ok.period = 1.0 + 2 * u(rng);
  in.ok.ell_ess = 0.5 + u(rng);
  if (family == 0) in.spec = KernelSpec::rbf(in.ok.amp, in.ok.rbf_b, in.sigma);
  else in.spec = KernelSpec::matern(in.ok.nu, in.ok.ell, in.ok.amp, in.sigma);
  if (family == 2) in.spec = KernelSpec::product(in.spec, in.ok.period, in.ok.ell_ess);
  auto pt = [&] {
    oracle::Pt p;
    for (std::size_t d = 0; d < dim; ++d) p.x.push_back(u(rng));
    p.t = family == 2 ? std::floor(6 * u(rng)) : 0.0;
    return p;
  };
  for (std::size_t i = 0; i < n; ++i) {
    in.X.push_back(pt());
    in.y.push_back(2 * u(rng) - 1);
  }
  std::sort(in.X.begin(), in.X.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  in.q = pt();
  return in;
}

inline GPDataset to_dataset(const Instance& in) {
  GPDataset d;
  for (std::size_t i = 0; i < in.X.size(); ++i) d.add(ap(in.X[i].x, in.X[i].t), in.y[i]);
  return d;
}

}  // namespace testing_support
