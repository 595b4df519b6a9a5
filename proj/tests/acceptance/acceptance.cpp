// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [criterion numbers...]   (default: all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "bogp/acquisition/acquisition.hpp"
#include "bogp/experiments/experiments.hpp"
#include "bogp/gp/gaussian_process.hpp"
#include "bogp/gp/kernel.hpp"
#include "instances.hpp"
#include "json.hpp"
#include "oracles.hpp"

#ifndef BOGP_CLI_PATH
#error "BOGP_CLI_PATH must point at the bogp_cli executable"
#endif

using namespace bogp;
using namespace bogp::exp;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig paper_config(const std::string& overrides = "{}") {
  return parse_config(overrides, "paper");
}

// Static EI runs on the default 7-site profile feed criteria 5 and 7.
const Outcome& default_optimize() {
  static const Outcome o = run_optimize(paper_config());
  return o;
}

Verdict c1_posterior_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  double worst_mean = 0, worst_std = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng() % 6;
    Instance in = random_instance(rng, n, rep % 3);
    if (rep % 10 == 0) {
      in.sigma = 0.0;
      in.spec.params.noise_std = 0.0;
    }
    const double c = -0.2;
    const auto got = posterior_predict(to_dataset(in), MeanPrior::constant(c), in.spec,
                                       ap(in.q.x, in.q.t));
    const auto want =
        oracle::condition(in.ok, in.sigma, in.X, in.y, std::vector<double>(n, c), c, in.q);
    worst_mean = std::max(worst_mean, std::abs(got.mean - want.mean));
    worst_std = std::max(worst_std, std::abs(got.std - want.std));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst_mean <= 1e-8 && worst_std <= 1e-8 && secs < 10.0,
          fmt("200 instances, max |dmean| %.2e, max |dstd| %.2e, %.2f s", worst_mean, worst_std,
              secs)};
}

Verdict c2_ei_monte_carlo() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  double worst = 0, worst_sample = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const double mu = 4 * u(rng) - 2, sd = 0.05 + 2 * u(rng), inc = 4 * u(rng) - 2,
                 xi = 0.5 * u(rng);
    const double ei = ei_value({mu, sd}, inc, xi);
    const int m = 1000000;
    double s = 0, s2 = 0;
    for (int i = 0; i < m; ++i) {
      const double imp = std::max(mu + sd * z(rng) - inc - xi, 0.0);
      s += imp;
      s2 += imp * imp;
    }
    const double mean = s / m;
    // Standard error of the estimator from the exact second moment of the
    // improvement; the sample variance collapses when almost no draw improves.
    const double dlt = mu - inc - xi, zz = dlt / sd;
    const double cdf = 0.5 * std::erfc(-zz / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * zz * zz) / std::sqrt(2.0 * std::numbers::pi);
    const double m2 = (dlt * dlt + sd * sd) * cdf + dlt * sd * pdf;
    const double se = std::sqrt(std::max(m2 - ei * ei, 0.0) / m);
    const double sample_se = std::sqrt(std::max(s2 / m - mean * mean, 0.0) / m);
    worst = std::max(worst, std::abs(ei - mean) / se);
    if (sample_se > 0) worst_sample = std::max(worst_sample, std::abs(ei - mean) / sample_se);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 3.0 && secs < 30.0,
          fmt("50 tuples, worst |EI - MC| = %.2f SE (%.2f by sample SE), %.2f s", worst,
              worst_sample, secs)};
}

Verdict c3_kernel_identities() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_exp = 0, worst_sym = 0;
  bool ess_exact = true;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> ell = {0.1 + u(rng), 0.1 + u(rng)};
    const auto p = ap({u(rng), u(rng)}), q = ap({u(rng), u(rng)});
    const double d = std::hypot((p.config[0] - q.config[0]) / ell[0],
                                (p.config[1] - q.config[1]) / ell[1]);
    worst_exp = std::max(worst_exp, std::abs(kernel_eval(KernelSpec::matern(0.5, ell), p, q) -
                                             std::exp(-d)));
  }
  for (int i = 0; i < 200; ++i) {
    Instance in = random_instance(rng, 2, i % 3);
    const auto p = ap(in.X[0].x, in.X[0].t + u(rng)), q = ap(in.X[1].x, in.X[1].t + u(rng));
    worst_sym = std::max(worst_sym, std::abs(kernel_eval(in.spec, p, q) - kernel_eval(in.spec, q, p)));
    const double D = 0.5 + 2 * u(rng), t = 10 * u(rng);
    const auto e = KernelSpec::ess(D, 0.3 + u(rng));
    for (int m = 1; m <= 5; ++m)
      ess_exact &= kernel_eval(e, ap({0.0}, t), ap({0.0}, t + m * D)) == 1.0;
    const double a = u(rng), b = u(rng);
    worst_sym = std::max(worst_sym,
                         std::abs(kernel_eval(e, ap({0.0}, a), ap({0.0}, b)) -
                                  kernel_eval(e, ap({0.0}, b), ap({0.0}, a))));
  }
  return {worst_exp <= 1e-12 && ess_exact && worst_sym <= 1e-15,
          fmt("matern-1/2 vs exp(-d): %.1e; ESS at multiples of D exact: %s; max asymmetry %.1e",
              worst_exp, ess_exact ? "yes" : "no", worst_sym)};
}

Verdict c4_fit_monotone() {
  int ok = 0;
  for (int s = 0; s < 20; ++s) {
    std::mt19937_64 rng(400 + s);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z;
    GPDataset d;
    for (int i = 0; i < 25; ++i) {
      const double a = u(rng), b = u(rng);
      d.add(ConfigPoint{a, b}, std::sin(5 * a) * std::cos(3 * b) + 0.1 * z(rng));
    }
    const auto start = s % 2 ? KernelSpec::matern(2.5, {1.0, 1.0}, 1.0, 0.3)
                             : KernelSpec::rbf(1.0, 2.0, 0.3);
    const MeanPrior prior = MeanPrior::constant(0.0);
    const double before = log_marginal_likelihood(d, prior, start);
    KernelSpec fitted = start;
    fitted.params = fit_hyperparameters(d, prior, start, default_fit_bounds(start, d, prior), 3, s);
    if (log_marginal_likelihood(d, prior, fitted) >= before) ++ok;
  }
  return {ok == 20, fmt("%d/20 fits did not lower the log marginal likelihood", ok)};
}

Verdict c5_convergence() {
  const Outcome& o = default_optimize();
  std::vector<double> best;
  for (const auto& t : o.variants.at("bogp")) {
    const std::size_t n = std::min<std::size_t>(30, t.fraction.size());
    best.push_back(n ? t.fraction[n - 1] : 0.0);
  }
  const double med = median(best);
  return {best.size() >= 16 && med >= 0.85,
          fmt("%zu seeds, median fraction of optimum within 30 evaluations %.3f (need >= 0.85)",
              best.size(), med)};
}

Verdict c6_prior_reuse() {
  const std::string base = R"({"utility": {"r": 0}, "kernel": {"amplitude": 1e14, "noise_std": 1e5}})";
  auto with_prior = [&](const char* prior) {
    auto j = nlohmann::json::parse(base);
    j["prior"] = nlohmann::json::parse(prior);
    return run_optimize(paper_config(j.dump())).variants.at("bogp");
  };
  const auto constant = with_prior(R"({"kind": "constant", "value": 0})");
  const auto prior0 = with_prior(R"({"kind": "surface", "transform": "none"})");
  const auto prior3 = with_prior(R"({"kind": "surface", "transform": "mirror"})");
  auto first5 = [](const std::vector<SeedTrace>& ts) {
    std::vector<double> v;
    for (const auto& t : ts) {
      double s = 0;
      const std::size_t n = std::min<std::size_t>(5, t.incumbent.size());
      for (std::size_t i = 0; i < n; ++i) s += t.incumbent[i];
      v.push_back(s / static_cast<double>(n));
    }
    return median(v);
  };
  auto frac20 = [](const std::vector<SeedTrace>& ts) {
    std::vector<double> v;
    for (const auto& t : ts) v.push_back(t.fraction[std::min<std::size_t>(20, t.fraction.size()) - 1]);
    return median(v);
  };
  const double c5 = first5(constant), p5 = first5(prior0);
  const double c20 = frac20(constant), m20 = frac20(prior3);
  return {p5 > c5 && m20 < c20,
          fmt("median incumbent over steps 1-5: prior0 %.4g vs constant %.4g; "
              "median fraction at 20: mirror %.3f vs constant %.3f",
              p5, c5, m20, c20)};
}

Verdict c7_safe_exploration() {
  const auto& bo = default_optimize().variants.at("bogp");
  const auto gs = run_baseline(paper_config()).variants.at("cd_gss");
  int wins = 0;
  const std::size_t n = std::min(bo.size(), gs.size());
  for (std::size_t i = 0; i < n; ++i) {
    double bmin = INFINITY, gmin = INFINITY;
    for (const auto& r : bo[i].rows)
      if (r.step > 10) bmin = std::min(bmin, r.utility);
    const std::size_t first_switch = gs[i].switch_steps.empty() ? 1 : gs[i].switch_steps.front();
    for (const auto& r : gs[i].rows)
      if (r.step >= first_switch) gmin = std::min(gmin, r.utility);
    wins += bmin >= gmin;
  }
  const double share = n ? static_cast<double>(wins) / n : 0.0;
  return {share >= 0.75, fmt("BO min after step 10 >= CD-GSS min after switches in %d/%zu seeds", wins, n)};
}

Verdict c8_dynamic() {
  Outcome o = run_dynamic_experiment(paper_config());
  auto window_mean = [](const SeedTrace& t) {
    double s = 0;
    int n = 0;
    for (const auto& r : t.rows)
      if (r.step >= 26 && r.step <= 50) s += r.utility, ++n;
    return n ? s / n : -INFINITY;
  };
  const auto& d1 = o.variants.at("D=1");
  const auto& d2 = o.variants.at("D=2");
  int wins = 0;
  for (std::size_t i = 0; i < d1.size(); ++i) wins += window_mean(d2[i]) > window_mean(d1[i]);
  const double share = d1.empty() ? 0.0 : static_cast<double>(wins) / d1.size();
  return {d1.size() == 16 && share >= 0.6,
          fmt("D=2 beats D=1 on mean utility over steps 26-50 in %d/%zu seeds", wins, d1.size())};
}

std::map<std::string, std::string> csv_files(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

Verdict c9_determinism() {
  const fs::path root = fs::temp_directory_path() / ("bogp_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const char* commands[] = {"surface", "optimize", "baseline", "dynamic", "build-prior"};
  int files = 0;
  std::vector<std::string> bad;
  for (const char* cmd : commands) {
    for (const char* run : {"a", "b"}) {
      const fs::path out = root / cmd / run;
      const std::string line = std::string("\"") + BOGP_CLI_PATH + "\" " + cmd +
                               " --profile small --seeds 1..2 --out \"" + out.string() +
                               "\" > /dev/null";
      if (std::system(line.c_str()) != 0) bad.push_back(std::string(cmd) + " failed");
    }
    const auto a = csv_files(root / cmd / "a"), b = csv_files(root / cmd / "b");
    if (a.empty() || a != b) bad.push_back(cmd);
    files += static_cast<int>(a.size());
  }
  fs::remove_all(root);
  std::string detail = fmt("%d CSV files compared across 5 commands", files);
  for (const auto& b : bad) detail += "; mismatch: " + b;
  return {bad.empty(), detail};
}

Verdict c10_surface_structure() {
  const ExperimentConfig cfg = paper_config(R"({"utility": {"r": 0}})");
  const olpc::NetworkScenario net(cfg.scenario);
  const auto t = olpc::exhaustive_surface(net, cfg.utility, cfg.surface_seed);
  const std::size_t na = olpc::alpha_values().size(), np = olpc::p0_values().size();
  int maxima = 0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < np; ++j) {
      const double v = t.values[i * np + j];
      bool local = true;
      if (i > 0) local &= t.values[(i - 1) * np + j] < v;
      if (i + 1 < na) local &= t.values[(i + 1) * np + j] < v;
      if (j > 0) local &= t.values[i * np + j - 1] < v;
      if (j + 1 < np) local &= t.values[i * np + j + 1] < v;
      maxima += local;
    }
  return {maxima >= 2, fmt("%d strict 4-neighborhood local maxima on the r=0 surface", maxima)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"GP posterior vs block-conditioning oracle", c1_posterior_oracle},
      {"EI closed form vs Monte Carlo", c2_ei_monte_carlo},
      {"kernel identities", c3_kernel_identities},
      {"hyperparameter fit monotonicity", c4_fit_monotone},
      {"convergence to 85% of optimum in 30 evaluations", c5_convergence},
      {"prior reuse effect", c6_prior_reuse},
      {"safe exploration vs CD-GSS", c7_safe_exploration},
      {"dynamic BO, D=2 vs D=1", c8_dynamic},
      {"byte-identical CSV reruns", c9_determinism},
      {"non-unimodal r=0 surface", c10_surface_structure},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id,
                criteria[i].first, v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed ? 1 : 0;
}
