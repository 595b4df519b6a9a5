#include "bogp/engine/bo_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "bogp/errors.hpp"
#include "bogp/gp/local_ascent.hpp"
#include "bogp/seeding.hpp"

namespace bogp {

void LoopConfig::validate(const KernelSpec& spec) const {
  acq.validate();
  spec.validate();
  if (!(termination_epsilon >= 0.0))
    throw InvalidInput("termination epsilon must be >= 0");
  if (max_steps < 1) throw InvalidInput("max_steps must be >= 1");
  if (refit_every < 1) throw InvalidInput("refit_every must be >= 1");
  if (fit_restarts < 0) throw InvalidInput("fit_restarts must be >= 0");
  if (window_size && *window_size < 1) throw InvalidInput("window_size must be >= 1");
  if (mode == LoopMode::kDynamic) {
    if (spec.family != KernelFamily::kProductSpaceTime)
      throw InvalidInput("dynamic loops need the product space-time kernel");
    if (acq.kind != AcquisitionKind::kUCB)
      throw InvalidInput("dynamic loops use UCB");
  } else if (spec.has_time_factor()) {
    throw InvalidInput("static loops cannot use a time kernel");
  }
}

std::optional<std::size_t> default_window(LoopMode mode) {
  if (mode == LoopMode::kDynamic) return 64;
  return std::nullopt;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ConfigPoint initial_point(const MeanPrior& prior, const FeasibleSet& feasible,
                          std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed({seed, 0x696e6974ULL}));
  const bool flat = prior.kind() == MeanPrior::Kind::kConstant;
  if (feasible.kind() == FeasibleSet::Kind::kDiscreteGrid) {
    const auto& pts = feasible.points();
    if (flat) {
      std::uniform_int_distribution<std::size_t> u(0, pts.size() - 1);
      return pts[u(rng)];
    }
    std::size_t arg = 0;
    double best = prior(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double v = prior(pts[i]);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    return pts[arg];
  }

  const std::size_t k = feasible.dim();
  auto draw = [&] {
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_real_distribution<double> u(feasible.lower()[i],
                                               feasible.upper()[i]);
      x[i] = u(rng);
    }
    return x;
  };
  if (flat) return ConfigPoint(draw());
  AscentOptions opts;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = feasible.upper()[i] - feasible.lower()[i];
    opts.fd_step.push_back(1e-6 * w);
    opts.max_step.push_back(0.25 * w);
  }
  auto f = [&](std::span<const double> x) {
    return prior(ConfigPoint(std::vector<double>(x.begin(), x.end())));
  };
  AscentResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < 10; ++s) {
    AscentResult r = local_ascent(f, draw(), feasible.lower().coords,
                                  feasible.upper().coords, opts);
    if (r.value > best.value) best = std::move(r);
  }
  return ConfigPoint(best.x);
}

void pick_best(RunResult& out) {
  if (out.history.empty()) return;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < out.history.size(); ++i)
    if (out.history[i].observed > out.history[arg].observed) arg = i;
  out.best = out.history[arg].point;
  out.best_value = out.history[arg].observed;
}

RunResult run_loop(const ObjectiveHandle& objective, const MeanPrior& prior,
                   const KernelSpec& spec, const LoopConfig& loop,
                   const FeasibleSet& feasible) {
  using Clock = std::chrono::steady_clock;
  const bool dynamic = loop.mode == LoopMode::kDynamic;
  RunResult out;
  GPDataset data;
  KernelSpec current = spec;

  auto evaluate = [&](IterationRecord rec, Clock::time_point t0) {
    try {
      rec.observed = objective(rec.point, rec.step);
    } catch (const std::exception& e) {
      out.aborted = true;
      out.abort_reason = "objective failed at step " +
                         std::to_string(rec.step) + ": " + e.what();
      return false;
    }
    if (!std::isfinite(rec.observed)) {
      out.aborted = true;
      out.abort_reason =
          "objective returned a non-finite value at step " + std::to_string(rec.step);
      return false;
    }
    data.add(AugmentedPoint{rec.point, rec.time}, rec.observed);
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.history.push_back(std::move(rec));
    return true;
  };

  {
    const auto t0 = Clock::now();
    IterationRecord rec;
    rec.step = 1;
    rec.point = initial_point(prior, feasible, loop.seed);
    rec.time = dynamic ? 1.0 : 0.0;
    rec.predicted = GaussianProcess(GPDataset{}, prior, current)
                        .predict({rec.point, rec.time});
    rec.acq_value = kNaN;
    rec.params = current.params;
    if (!evaluate(std::move(rec), t0)) return out;
  }

  for (int step = 2; step <= loop.max_steps; ++step) {
    const auto t0 = Clock::now();
    const auto ustep = static_cast<std::uint64_t>(step);
    const GPDataset window =
        loop.window_size && data.size() > *loop.window_size
            ? data.tail(*loop.window_size)
            : data;

    if (loop.fit_restarts > 0 && (step - 2) % loop.refit_every == 0 &&
        window.size() >= 2) {
      try {
        const FitBounds bounds = default_fit_bounds(spec, window, prior, loop.fit);
        current.params =
            fit_hyperparameters(window, prior, current, bounds, loop.fit_restarts,
                                derive_seed({loop.seed, ustep, 0x666974ULL}));
      } catch (const std::exception&) {
        ++out.fit_failures;
      }
    }

    IterationRecord rec;
    rec.step = static_cast<std::size_t>(step);
    rec.time = dynamic ? static_cast<double>(step) : 0.0;
    try {
      const GaussianProcess gp(window, prior, current);
      AcquisitionContext ctx;
      if (dynamic) ctx.time_next = rec.time;
      ctx.iteration = static_cast<std::size_t>(step - 1);
      ctx.seed = derive_seed({loop.seed, ustep, 0x616371ULL});
      const AcquisitionChoice choice =
          maximize_acquisition(gp, loop.acq, feasible, ctx);
      if (!dynamic && loop.acq.kind != AcquisitionKind::kUCB &&
          choice.value < loop.termination_epsilon)
        break;
      rec.point = choice.point;
      rec.predicted = choice.prediction;
      rec.acq_value = choice.value;
      rec.solve_size = gp.solve_size();
    } catch (const std::exception& e) {
      out.aborted = true;
      out.abort_reason =
          "inference failed at step " + std::to_string(step) + ": " + e.what();
      break;
    }
    rec.params = current.params;
    if (!evaluate(std::move(rec), t0)) break;
  }
  pick_best(out);
  return out;
}

}  // namespace

RunResult run_static(const ObjectiveHandle& objective, const MeanPrior& prior,
                     const KernelSpec& spec, const LoopConfig& loop,
                     const FeasibleSet& feasible) {
  if (loop.mode != LoopMode::kStatic) throw InvalidInput("run_static needs STATIC mode");
  loop.validate(spec);
  return run_loop(objective, prior, spec, loop, feasible);
}

RunResult run_dynamic(const ObjectiveHandle& objective, const MeanPrior& prior,
                      const KernelSpec& spec, const LoopConfig& loop,
                      const FeasibleSet& feasible) {
  if (loop.mode != LoopMode::kDynamic)
    throw InvalidInput("run_dynamic needs DYNAMIC mode");
  loop.validate(spec);
  return run_loop(objective, prior, spec, loop, feasible);
}

bool should_terminate(std::size_t steps_done, const GPDataset& dataset,
                      const MeanPrior& prior, const KernelSpec& spec,
                      const AcquisitionSpec& acq, const FeasibleSet& feasible,
                      double epsilon, int max_steps,
                      const AcquisitionContext& ctx) {
  if (acq.kind == AcquisitionKind::kUCB)
    throw InvalidInput("UCB loops terminate on the step budget only");
  if (max_steps >= 0 && steps_done > static_cast<std::size_t>(max_steps)) return true;
  const AcquisitionChoice c =
      maximize_acquisition(dataset, prior, spec, acq, feasible, ctx);
  return c.value < epsilon;
}

std::vector<double> incumbent_trace(const std::vector<IterationRecord>& history) {
  std::vector<double> trace;
  trace.reserve(history.size());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : history) {
    best = std::max(best, r.observed);
    trace.push_back(best);
  }
  return trace;
}

ExplorationStats exploration_stats(const std::vector<IterationRecord>& history,
                                   double threshold) {
  ExplorationStats s;
  if (history.empty()) return s;
  s.min_utility = std::numeric_limits<double>::infinity();
  std::size_t below = 0;
  for (const auto& r : history) {
    s.min_utility = std::min(s.min_utility, r.observed);
    if (r.observed < threshold) ++below;
  }
  s.fraction_below = static_cast<double>(below) / static_cast<double>(history.size());
  return s;
}

}  // namespace bogp
