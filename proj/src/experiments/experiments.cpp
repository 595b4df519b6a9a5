#include "bogp/experiments/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <atomic>
#include <exception>
#include <thread>

#include "bogp/errors.hpp"
#include "bogp/seeding.hpp"
#include "json.hpp"

namespace bogp::exp {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string label_r(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u_r%g", r);
  return buf;
}

void finish_trace(SeedTrace& t, const SurfaceRange* range) {
  std::vector<double> u;
  for (const Row& r : t.rows) u.push_back(r.utility);
  t.incumbent = running_max(u);
  if (range) t.fraction = fraction_of_optimum(t.incumbent, *range);
  t.min_utility = u.empty() ? kNaN : *std::min_element(u.begin(), u.end());
}

SeedTrace trace_from_run(std::uint64_t seed, const RunResult& r,
                         const std::vector<int>& schedule) {
  SeedTrace t;
  t.seed = seed;
  for (const auto& rec : r.history) {
    Row row;
    row.step = rec.step;
    row.alpha = rec.point[0];
    row.p0 = rec.point[1];
    row.utility = rec.observed;
    row.post_mean = rec.predicted.mean;
    row.post_std = rec.predicted.std;
    row.acq_value = rec.acq_value;
    if (!schedule.empty()) row.load = schedule[(rec.step - 1) % schedule.size()];
    t.rows.push_back(row);
    t.wall_seconds += rec.wall_seconds;
  }
  if (!r.history.empty()) {
    t.best = olpc::from_point(r.best);
    t.best_value = r.best_value;
  }
  t.fit_failures = r.fit_failures;
  t.aborted = r.aborted;
  t.abort_reason = r.abort_reason;
  return t;
}

template <class F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return v[lo] + w * (v[hi] - v[lo]);
}

json band_json(const Band& b) {
  return {{"median", b.median}, {"q025", b.q025},     {"q975", b.q975},
          {"mean", b.mean},     {"ci95_low", b.ci_low}, {"ci95_high", b.ci_high},
          {"count", b.count}};
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Runs f(seed) for every seed on a worker pool; results keep seed order.
template <class F>
std::vector<SeedTrace> map_seeds(const std::vector<std::uint64_t>& seeds, F&& f) {
  std::vector<SeedTrace> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
      try {
        out[i] = f(seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n =
      std::min<std::size_t>(seeds.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

FeasibleSet olpc_feasible_set() {
  std::vector<ConfigPoint> pts;
  for (const auto& c : olpc::config_grid()) pts.push_back(olpc::to_point(c));
  return FeasibleSet::grid(std::move(pts));
}

std::vector<GSSAxis> olpc_axes() {
  const auto& av = olpc::alpha_values();
  const auto& pv = olpc::p0_values();
  return {GSSAxis{av.front(), av.back(), av}, GSSAxis{pv.front(), pv.back(), pv}};
}

ObjectiveHandle make_objective(const olpc::NetworkScenario& scenario,
                               const olpc::UtilitySpec& utility, std::uint64_t run_seed,
                               std::vector<int> load_schedule) {
  return [&scenario, utility, run_seed, schedule = std::move(load_schedule)](
             const ConfigPoint& p, std::size_t step) {
    olpc::UtilitySpec u = utility;
    if (!schedule.empty()) u.ues_per_cell = schedule[(step - 1) % schedule.size()];
    const olpc::OLPCConfig c = olpc::from_point(p);
    if (!olpc::on_grid(c)) throw InvalidInput("objective queried off the OLPC grid");
    return olpc::utility_observation(scenario, c, u,
                                     derive_seed({run_seed, static_cast<std::uint64_t>(step)}));
  };
}

std::vector<olpc::SurfaceTable> compute_surfaces(const olpc::NetworkScenario& scenario,
                                                 const olpc::UtilitySpec& utility,
                                                 std::uint64_t seed) {
  return olpc::exhaustive_surfaces(scenario, utility, {0.0, 1.0, 2.0}, seed);
}

PriorTable build_prior_table(const ExperimentConfig& cfg,
                             std::optional<std::size_t> subsample,
                             PriorTransform transform, double constant) {
  const std::string source = "scenario n_sites=" + std::to_string(cfg.prior_scenario.n_sites) +
                             " ues_per_cell=" + std::to_string(cfg.prior_scenario.ues_per_cell) +
                             " seed=" + std::to_string(cfg.prior_scenario.seed);
  if (transform == PriorTransform::kConstant)
    return build_prior({}, std::nullopt, transform, constant, "constant");
  const olpc::NetworkScenario net(cfg.prior_scenario);
  const auto surface = olpc::exhaustive_surface(net, cfg.utility, cfg.surface_seed);
  return build_prior(surface, subsample, transform, 0.0, source);
}

MeanPrior resolve_prior(const ExperimentConfig& cfg) {
  switch (cfg.prior.kind) {
    case PriorSource::Kind::kConstant:
      return MeanPrior::constant(cfg.prior.value);
    case PriorSource::Kind::kFile: {
      std::ifstream in(cfg.prior.path);
      if (!in) throw ConfigError("cannot read prior file: " + cfg.prior.path);
      try {
        return prior_as_mean(read_prior_csv(in));
      } catch (const InvalidInput& e) {
        throw ConfigError("prior file " + cfg.prior.path + ": " + e.what());
      }
    }
    case PriorSource::Kind::kSurface:
      return prior_as_mean(
          build_prior_table(cfg, cfg.prior.subsample, cfg.prior.transform));
  }
  return MeanPrior::constant(0.0);
}

SurfaceRange surface_range(const olpc::SurfaceTable& t) {
  SurfaceRange r;
  r.min = t.values[t.argmin()];
  r.max = t.values[t.argmax()];
  r.argmax = t.configs[t.argmax()];
  return r;
}

std::vector<double> fraction_of_optimum(const std::vector<double>& values,
                                        const SurfaceRange& range) {
  std::vector<double> out;
  const double span = range.max - range.min;
  for (double v : values) out.push_back(span > 0.0 ? (v - range.min) / span : 1.0);
  return out;
}

std::vector<double> running_max(const std::vector<double>& values) {
  std::vector<double> out;
  double best = -std::numeric_limits<double>::infinity();
  for (double v : values) out.push_back(best = std::max(best, v));
  return out;
}

bool Outcome::any_aborted() const {
  for (const auto& [name, traces] : variants)
    for (const auto& t : traces)
      if (t.aborted) return true;
  return false;
}

Outcome run_optimize(const ExperimentConfig& cfg) {
  LoopConfig loop = cfg.loop;
  loop.mode = LoopMode::kStatic;
  as_config_error([&] {
    loop.validate(cfg.kernel);
    return 0;
  });
  const olpc::NetworkScenario net(cfg.scenario);
  Outcome out;
  out.command = "optimize";
  out.range = surface_range(olpc::exhaustive_surface(net, cfg.utility, cfg.surface_seed));
  const MeanPrior prior = resolve_prior(cfg);
  const FeasibleSet feasible = olpc_feasible_set();
  out.variants["bogp"] = map_seeds(cfg.seeds, [&](std::uint64_t seed) {
    LoopConfig l = loop;
    l.seed = seed;
    const RunResult r = run_static(make_objective(net, cfg.utility, seed), prior,
                                   cfg.kernel, l, feasible);
    SeedTrace t = trace_from_run(seed, r, {});
    finish_trace(t, &out.range);
    return t;
  });
  return out;
}

Outcome run_baseline(const ExperimentConfig& cfg) {
  const olpc::NetworkScenario net(cfg.scenario);
  Outcome out;
  out.command = "baseline";
  out.range = surface_range(olpc::exhaustive_surface(net, cfg.utility, cfg.surface_seed));
  const auto axes = olpc_axes();
  out.variants["cd_gss"] = map_seeds(cfg.seeds, [&](std::uint64_t seed) {
    GSSOptions opts;
    opts.passes = cfg.baseline.passes;
    opts.line_budget = cfg.baseline.line_budget;
    opts.max_evaluations = cfg.baseline.max_evaluations;
    opts.seed = seed;
    const auto t0 = Clock::now();
    const GSSResult r = cd_gss(make_objective(net, cfg.utility, seed), axes, opts);
    SeedTrace t;
    t.seed = seed;
    for (const auto& e : r.history)
      t.rows.push_back({e.step, e.point[0], e.point[1], e.observed, kNaN, kNaN, kNaN, 0});
    if (!r.history.empty()) {
      t.best = olpc::from_point(r.best);
      t.best_value = r.best_value;
    }
    t.switch_steps = r.switch_steps;
    t.aborted = r.aborted;
    t.abort_reason = r.abort_reason;
    t.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    finish_trace(t, &out.range);
    return t;
  });
  return out;
}

Outcome run_dynamic_experiment(const ExperimentConfig& cfg) {
  const auto& dyn = cfg.dynamic;
  AcquisitionSpec ucb = cfg.loop.acq;
  ucb.kind = AcquisitionKind::kUCB;
  LoopConfig base = cfg.loop;
  base.acq = ucb;
  base.max_steps = dyn.max_steps;
  base.termination_epsilon = 0.0;

  const olpc::NetworkScenario net(cfg.scenario);
  const MeanPrior prior = resolve_prior(cfg);
  const FeasibleSet feasible = olpc_feasible_set();
  const auto& schedule = dyn.load_schedule;
  Outcome out;
  out.command = "dynamic";

  for (double period : dyn.periods) {
    LoopConfig loop = base;
    loop.mode = LoopMode::kDynamic;
    loop.window_size = dyn.window_size;
    const KernelSpec kernel = KernelSpec::product(dyn.kernel, period, dyn.ess_lengthscale);
    as_config_error([&] {
      loop.validate(kernel);
      return 0;
    });
    char name[32];
    std::snprintf(name, sizeof name, "D=%g", period);
    out.variants[name] = map_seeds(cfg.seeds, [&](std::uint64_t seed) {
      LoopConfig l = loop;
      l.seed = seed;
      const RunResult r = run_dynamic(make_objective(net, cfg.utility, seed, schedule),
                                      prior, kernel, l, feasible);
      SeedTrace t = trace_from_run(seed, r, schedule);
      finish_trace(t, nullptr);
      return t;
    });
  }

  if (dyn.parallel_static) {
    LoopConfig loop = base;
    loop.mode = LoopMode::kStatic;
    loop.window_size = cfg.loop.window_size;
    as_config_error([&] {
      loop.validate(dyn.kernel);
      return 0;
    });
    const std::size_t states = schedule.size();
    const auto n_total = static_cast<std::size_t>(dyn.max_steps);
    out.variants["parallel_static"] = map_seeds(cfg.seeds, [&, loop](std::uint64_t seed) mutable {
      const ObjectiveHandle full = make_objective(net, cfg.utility, seed, schedule);
      SeedTrace merged;
      merged.seed = seed;
      std::vector<std::pair<std::size_t, Row>> rows;
      for (std::size_t s = 0; s < states && s < n_total; ++s) {
        // Global steps s+1, s+1+L, ...
        const std::size_t local_steps = (n_total - s + states - 1) / states;
        loop.max_steps = static_cast<int>(local_steps);
        loop.seed = derive_seed({seed, 0x706172ULL, s});
        ObjectiveHandle local = [&full, s, states](const ConfigPoint& p, std::size_t j) {
          return full(p, s + 1 + (j - 1) * states);
        };
        const RunResult r = run_static(local, prior, dyn.kernel, loop, feasible);
        SeedTrace part = trace_from_run(seed, r, {});
        for (Row row : part.rows) {
          row.step = s + 1 + (row.step - 1) * states;
          row.load = schedule[s];
          rows.emplace_back(row.step, row);
        }
        merged.fit_failures += part.fit_failures;
        merged.wall_seconds += part.wall_seconds;
        if (part.aborted) {
          merged.aborted = true;
          merged.abort_reason = part.abort_reason;
        }
      }
      std::sort(rows.begin(), rows.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      // Keep the dense prefix of steps; an aborted state truncates the trace.
      for (std::size_t i = 0; i < rows.size() && rows[i].first == i + 1; ++i)
        merged.rows.push_back(rows[i].second);
      if (!merged.rows.empty()) {
        const auto best = std::max_element(
            merged.rows.begin(), merged.rows.end(),
            [](const Row& a, const Row& b) { return a.utility < b.utility; });
        merged.best = {best->alpha, best->p0};
        merged.best_value = best->utility;
      }
      finish_trace(merged, nullptr);
      return merged;
    });
  }
  return out;
}

Band aggregate(const std::vector<std::vector<double>>& traces) {
  Band b;
  std::size_t len = 0;
  for (const auto& t : traces) len = std::max(len, t.size());
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<double> v;
    for (const auto& t : traces)
      if (i < t.size()) v.push_back(t[i]);
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    const double half = 1.96 * sd / std::sqrt(n);
    b.median.push_back(quantile(v, 0.5));
    b.q025.push_back(quantile(v, 0.025));
    b.q975.push_back(quantile(v, 0.975));
    b.mean.push_back(mean);
    b.ci_low.push_back(mean - half);
    b.ci_high.push_back(mean + half);
    b.count.push_back(v.size());
  }
  return b;
}

void write_surface_csv(std::ostream& os, const std::vector<olpc::SurfaceTable>& tables,
                       const std::string& config_json) {
  os << "# schema: bogp-surface/1\n# config: " << config_json << "\n";
  os << "index,alpha,p0";
  for (const auto& t : tables) os << ',' << label_r(t.r);
  os << "\n";
  const std::size_t n = tables.empty() ? 0 : tables.front().configs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = tables.front().configs[i];
    os << i << ',' << fmt(c.alpha) << ',' << fmt(c.p0);
    for (const auto& t : tables) os << ',' << fmt(t.values[i]);
    os << "\n";
  }
}

std::string surface_summary_json(const std::vector<olpc::SurfaceTable>& tables,
                                 const std::string& config_json) {
  json j;
  j["schema"] = "bogp-surface-summary/1";
  j["config"] = json::parse(config_json);
  j["rows"] = tables.empty() ? 0 : tables.front().values.size();
  json opt = json::array();
  for (const auto& t : tables) {
    const std::size_t a = t.argmax(), m = t.argmin();
    opt.push_back({{"r", t.r},
                   {"argmax_index", a},
                   {"alpha", t.configs[a].alpha},
                   {"p0", t.configs[a].p0},
                   {"max", t.values[a]},
                   {"min", t.values[m]}});
  }
  j["optima"] = opt;
  return j.dump(2) + "\n";
}

void write_trace_csv(std::ostream& os, const SeedTrace& t, const std::string& schema,
                     const std::string& config_json, bool with_load) {
  os << "# schema: " << schema << "\n# config: " << config_json << "\n";
  os << "# seed: " << t.seed << "\n";
  os << "step,alpha,p0,utility,post_mean,post_std,acq_value" << (with_load ? ",load" : "")
     << "\n";
  for (const Row& r : t.rows) {
    os << r.step << ',' << fmt(r.alpha) << ',' << fmt(r.p0) << ',' << fmt(r.utility) << ','
       << fmt(r.post_mean) << ',' << fmt(r.post_std) << ',' << fmt(r.acq_value);
    if (with_load) os << ',' << r.load;
    os << "\n";
  }
}

std::string outcome_summary_json(const Outcome& o, const std::string& config_json) {
  json j;
  j["schema"] = "bogp-summary/1";
  j["command"] = o.command;
  j["config"] = json::parse(config_json);
  if (o.command != "dynamic")
    j["surface"] = {{"min", o.range.min},
                    {"max", o.range.max},
                    {"argmax", {{"alpha", o.range.argmax.alpha}, {"p0", o.range.argmax.p0}}}};
  json variants = json::object();
  for (const auto& [name, traces] : o.variants) {
    json seeds = json::array();
    std::vector<std::vector<double>> inc, frac, util;
    for (const auto& t : traces) {
      std::vector<double> u;
      for (const Row& r : t.rows) u.push_back(r.utility);
      json s = {{"seed", t.seed},
                {"steps", t.rows.size()},
                {"best", {{"alpha", t.best.alpha}, {"p0", t.best.p0}, {"utility", num(t.best_value)}}},
                {"min_utility", num(t.min_utility)},
                {"fit_failures", t.fit_failures},
                {"aborted", t.aborted},
                {"utility", u},
                {"incumbent", t.incumbent}};
      if (!t.fraction.empty()) s["fraction"] = t.fraction;
      if (!t.switch_steps.empty()) s["switch_steps"] = t.switch_steps;
      if (t.aborted) s["abort_reason"] = t.abort_reason;
      seeds.push_back(std::move(s));
      inc.push_back(t.incumbent);
      util.push_back(u);
      if (!t.fraction.empty()) frac.push_back(t.fraction);
    }
    json agg = {{"incumbent", band_json(aggregate(inc))},
                {"utility", band_json(aggregate(util))}};
    if (!frac.empty()) agg["fraction"] = band_json(aggregate(frac));
    variants[name] = {{"seeds", seeds}, {"aggregate", agg}};
  }
  j["variants"] = variants;
  return j.dump(2) + "\n";
}

}  // namespace bogp::exp
