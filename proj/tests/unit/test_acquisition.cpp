#include <cmath>
#include <numbers>
#include <random>

#include "bogp/acquisition/acquisition.hpp"
#include "bogp/errors.hpp"
#include "bogp/olpc/simulator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bogp;

namespace {

AugmentedPoint ap(std::vector<double> x, double t = 0.0) { return {ConfigPoint(std::move(x)), t}; }

FeasibleSet olpc_grid() {
  std::vector<ConfigPoint> pts;
  for (const auto& c : olpc::config_grid()) pts.push_back(olpc::to_point(c));
  return FeasibleSet::grid(std::move(pts));
}

}  // namespace

TEST_CASE("EI closed form and degenerate branch") {
  CHECK(ei_value({1.0, 0.0}, 2.0, 0.0) == 0.0);
  CHECK(ei_value({3.0, 0.0}, 2.0, 0.5) == 0.5);
  CHECK(ei_value({3.0, 1e-13}, 2.0, 0.5) == 0.5);
  for (double s : {0.1, 1.0, 7.0})
    CHECK(ei_value({2.0, s}, 2.0, 0.0) == doctest::Approx(0.3989422804014327 * s).epsilon(1e-14));
}

TEST_CASE("EI at Z=0 against Monte Carlo") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  const double s = 1.3;
  const int n = 1'000'000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double imp = std::max(s * z(rng), 0.0);
    sum += imp;
    sq += imp * imp;
  }
  const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(ei_value({0.0, s}, 0.0, 0.0) - mean) <= 3 * se);
}

TEST_CASE("EI properties") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int rep = 0; rep < 2000; ++rep) {
    const double m = u(rng), s = std::abs(u(rng)), inc = u(rng), xi = std::abs(u(rng)) / 3;
    const double e = ei_value({m, s}, inc, xi);
    CHECK(e >= 0.0);
    CHECK(e >= std::max(m - inc - xi, 0.0) - 1e-15);
    CHECK(ei_value({m + 0.1, s}, inc, xi) >= e - 1e-15);
    if (m <= inc + xi) CHECK(ei_value({m, s + 0.1}, inc, xi) >= e - 1e-15);
  }
}

TEST_CASE("UCB") {
  CHECK(ucb_value({1.5, 2.0}, 0.0) == 1.5);
  CHECK(ucb_value({1.5, 0.0}, 9.0) == 1.5);
  CHECK(ucb_value({1.0, 2.0}, 1.0) == 3.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 4);
  for (int rep = 0; rep < 100; ++rep) {
    const double m = u(rng), s = u(rng), b = u(rng);
    CHECK(ucb_value({m, s}, b) - m == doctest::Approx(b * s).epsilon(1e-15));
  }
  AcquisitionSpec a;
  a.ucb_beta = 1.0;
  CHECK(a.beta_at(0) == 1.0);
  a.ucb_beta_schedule = {0.5, 2.0};
  CHECK(a.beta_at(0) == 0.5);
  CHECK(a.beta_at(7) == 2.0);
}

TEST_CASE("feasible set validation") {
  CHECK_THROWS_AS(FeasibleSet::grid({}), InvalidInput);
  CHECK_THROWS_AS(FeasibleSet::grid({ConfigPoint{0.0}, ConfigPoint{0.0}}), InvalidInput);
  CHECK_THROWS_AS(FeasibleSet::box(ConfigPoint{1.0}, ConfigPoint{1.0}), InvalidInput);
  AcquisitionSpec bad;
  bad.ei_xi = -1;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("KG") {
  const auto spec = KernelSpec::matern(2.5, {0.4}, 1.0, 0.0);
  const MeanPrior zero = MeanPrior::constant(0);
  const FeasibleSet grid = FeasibleSet::grid({ConfigPoint{0.0}, ConfigPoint{0.5}, ConfigPoint{1.0}});
  GPDataset d;
  d.add(ConfigPoint{0.0}, 0.3);
  d.add(ConfigPoint{1.0}, -0.2);

  SUBCASE("no gain at a sampled noiseless point") {
    CHECK(std::abs(kg_value(d, zero, spec, ap({0.0}), grid, 128, 3)) <= 1e-9);
  }
  SUBCASE("non-negative") {
    const auto noisy = KernelSpec::matern(2.5, {0.4}, 1.0, 0.2);
    for (double c : {0.0, 0.25, 0.5, 0.75, 1.0})
      for (std::uint64_t s = 0; s < 5; ++s)
        CHECK(kg_value(d, zero, noisy, ap({c}), grid, 64, s) >= -1e-9);
  }
  SUBCASE("box feasible set is unsupported") {
    CHECK_THROWS_AS(kg_value(d, zero, spec, ap({0.5}), FeasibleSet::box({0.0}, {1.0}), 8, 1),
                    UnsupportedFeasibleSet);
  }
  SUBCASE("matches brute-force fantasy re-conditioning") {
    const double sigma = 0.15;
    const auto noisy = KernelSpec::matern(2.5, {0.4}, 1.0, sigma);
    const oracle::Kern ok{1, 1.0, 1.0, 2.5, {0.4}};
    const std::vector<oracle::Pt> X{{{0.0}}, {{1.0}}};
    const std::vector<double> y{0.3, -0.2};
    const oracle::Pt cand{{0.5}};
    const std::vector<oracle::Pt> G{{{0.0}}, {{0.5}}, {{1.0}}};
    auto best_mean = [&](const std::vector<oracle::Pt>& Xs, const std::vector<double>& ys) {
      double b = -INFINITY;
      for (const auto& g : G)
        b = std::max(b, oracle::condition(ok, sigma, Xs, ys, std::vector<double>(Xs.size(), 0), 0, g).mean);
      return b;
    };
    const double base = best_mean(X, y);
    const auto pc = oracle::condition(ok, sigma, X, y, {0, 0}, 0, cand);
    const double sd = std::sqrt(pc.std * pc.std + sigma * sigma);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> z;
    const int M = 10000;
    double sum = 0, sq = 0;
    for (int j = 0; j < M; ++j) {
      auto Xs = X;
      auto ys = y;
      Xs.push_back(cand);
      ys.push_back(pc.mean + sd * z(rng));
      const double g = best_mean(Xs, ys) - base;
      sum += g;
      sq += g * g;
    }
    const double want = sum / M, se = std::sqrt((sq / M - want * want) / M);
    const double got = kg_value(d, zero, noisy, ap({0.5}), grid, M, 99);
    // Both sides are MC estimates with the same spread: 2 SE of the difference.
    CHECK(std::abs(got - want) <= 2 * std::sqrt(2.0) * se);
  }
}

TEST_CASE("grid maximization") {
  const auto spec = KernelSpec::matern(2.5, {0.4}, 1.0, 0.0);
  const MeanPrior zero = MeanPrior::constant(0);
  AcquisitionSpec ei;
  AcquisitionContext ctx;

  const auto single = FeasibleSet::grid({ConfigPoint{0.7}});
  CHECK(maximize_acquisition(GPDataset{}, zero, spec, ei, single, ctx).point == ConfigPoint{0.7});

  GPDataset all;
  const std::vector<ConfigPoint> pts{ConfigPoint{0.0}, ConfigPoint{0.5}, ConfigPoint{1.0}};
  for (const auto& p : pts) all.add(p, 1.0);
  const auto choice = maximize_acquisition(all, zero, spec, ei, FeasibleSet::grid(pts), ctx);
  CHECK(choice.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(choice.grid_index == std::optional<std::size_t>(0));
}

TEST_CASE("912-point OLPC grid equals a full-scan recomputation") {
  const FeasibleSet grid = olpc_grid();
  const auto spec = KernelSpec::matern(2.5, {50.0, 50.0 / 226.0}, 100.0, 1.0);
  const MeanPrior prior = MeanPrior::constant(5.0);
  GPDataset d;
  std::mt19937_64 rng(31);
  for (int i = 0; i < 5; ++i) {
    const auto& p = grid.points()[rng() % grid.points().size()];
    d.add(p, 40.0 + 10.0 * std::sin(3.0 * p[0] + 0.02 * p[1]));
  }
  const GaussianProcess gp(d, prior, spec);
  double inc = -INFINITY;
  for (const auto& p : d.points()) inc = std::max(inc, gp.predict(p).mean);
  for (auto kind : {AcquisitionKind::kEI, AcquisitionKind::kUCB}) {
    AcquisitionSpec acq;
    acq.kind = kind;
    acq.ucb_beta = 1.0;
    std::vector<double> scan;
    for (const auto& p : grid.points()) {
      const auto pr = gp.predict(AugmentedPoint{p, 0.0});
      scan.push_back(kind == AcquisitionKind::kEI ? ei_value(pr, inc, 0.0) : ucb_value(pr, 1.0));
    }
    const auto vals = acquisition_on_grid(gp, acq, grid, {});
    REQUIRE(vals.size() == scan.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
      CHECK(vals[i] == doctest::Approx(scan[i]).epsilon(1e-9));
      if (scan[i] > scan[best]) best = i;
    }
    const auto choice = maximize_acquisition(gp, acq, grid, {});
    CHECK(choice.grid_index == std::optional<std::size_t>(best));
  }
}

TEST_CASE("argmax invariance to a constant shift") {
  const FeasibleSet grid = olpc_grid();
  const auto spec = KernelSpec::matern(1.5, {0.3, 30.0}, 50.0, 0.5);
  std::mt19937_64 rng(77);
  GPDataset a, b;
  for (int i = 0; i < 6; ++i) {
    const auto& p = grid.points()[rng() % grid.points().size()];
    const double y = std::cos(2.0 * p[0]) * 10.0 + 0.05 * p[1];
    a.add(p, y);
    b.add(p, y + 123.0);
  }
  for (auto kind : {AcquisitionKind::kEI, AcquisitionKind::kUCB}) {
    AcquisitionSpec acq;
    acq.kind = kind;
    const auto ca = maximize_acquisition(a, MeanPrior::constant(1.0), spec, acq, grid, {});
    const auto cb = maximize_acquisition(b, MeanPrior::constant(124.0), spec, acq, grid, {});
    CHECK(ca.grid_index == cb.grid_index);
    CHECK(cb.prediction.mean == doctest::Approx(ca.prediction.mean + 123.0).epsilon(1e-9));
  }
}

TEST_CASE("box maximization and determinism") {
  const auto spec = KernelSpec::matern(2.5, {0.2}, 1.0, 0.01);
  GPDataset d;
  for (double x : {0.1, 0.4, 0.9}) d.add(ConfigPoint{x}, -(x - 0.3) * (x - 0.3));
  const auto box = FeasibleSet::box({0.0}, {1.0});
  AcquisitionSpec ucb;
  ucb.kind = AcquisitionKind::kUCB;
  AcquisitionContext ctx;
  ctx.seed = 4;
  const auto c1 = maximize_acquisition(d, MeanPrior::constant(0), spec, ucb, box, ctx);
  const auto c2 = maximize_acquisition(d, MeanPrior::constant(0), spec, ucb, box, ctx);
  CHECK(c1.point == c2.point);
  CHECK(c1.point[0] >= 0.0);
  CHECK(c1.point[0] <= 1.0);
  CHECK(!c1.grid_index);
  // No grid point of a fine scan beats the box optimum by more than the tolerance.
  const GaussianProcess gp(d, MeanPrior::constant(0), spec);
  for (int i = 0; i <= 200; ++i)
    CHECK(ucb_value(gp.predict(ap({i / 200.0})), 1.0) <= c1.value + 1e-3);
}
