#include "bogp/baselines/cd_gss.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "bogp/errors.hpp"
#include "bogp/seeding.hpp"

namespace bogp {

double GSSAxis::snap(double v) const {
  v = std::clamp(v, lo, hi);
  if (values.empty()) return v;
  auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it == values.end()) return values.back();
  if (it == values.begin()) return *it;
  const double up = *it, down = *(it - 1);
  return (v - down <= up - v) ? down : up;
}

double GSSAxis::step() const {
  double s = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    s = (s == 0.0) ? d : std::min(s, d);
  }
  return s;
}

void GSSAxis::validate() const {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    throw InvalidInput("GSS axis needs lo < hi");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < lo || values[i] > hi)
      throw InvalidInput("GSS axis value outside [lo, hi]");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw InvalidInput("GSS axis values must be strictly increasing");
  }
}

LineSearchResult golden_section(const std::function<double(double)>& f,
                                const GSSAxis& axis, double tol, int budget) {
  axis.validate();
  if (budget < 1) throw InvalidInput("line search budget must be >= 1");
  LineSearchResult res;
  std::map<double, double> cache;
  bool have_best = false;
  auto eval = [&](double x) {
    const double s = axis.snap(x);
    if (auto it = cache.find(s); it != cache.end()) return it->second;
    const double v = f(s);
    ++res.evaluations;
    cache.emplace(s, v);
    if (!have_best || v > res.best_value) {
      res.best_value = v;
      res.best_x = s;
      have_best = true;
    }
    return v;
  };
  auto fresh = [&](double x) { return cache.count(axis.snap(x)) != 0; };

  double a = axis.lo, b = axis.hi;
  double c = b - kGoldenRatio * (b - a);
  double d = a + kGoldenRatio * (b - a);
  double fc = eval(c);
  if (res.evaluations >= budget && !fresh(d)) return res;
  double fd = eval(d);
  res.brackets.push_back({0, a, b, c, d, 0});
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGoldenRatio * (b - a);
      if (res.evaluations >= budget && !fresh(c)) break;
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGoldenRatio * (b - a);
      if (res.evaluations >= budget && !fresh(d)) break;
      fd = eval(d);
    }
    res.brackets.push_back({0, a, b, c, d, 0});
  }
  return res;
}

GSSResult cd_gss(const ObjectiveHandle& objective, const std::vector<GSSAxis>& axes,
                 const GSSOptions& opts) {
  if (axes.empty()) throw InvalidInput("CD-GSS needs at least one axis");
  for (const auto& ax : axes) ax.validate();
  if (opts.passes < 1) throw InvalidInput("CD-GSS passes must be >= 1");
  if (opts.line_budget < 1) throw InvalidInput("CD-GSS line budget must be >= 1");
  if (opts.max_evaluations < 1) throw InvalidInput("CD-GSS needs >= 1 evaluation");
  const std::size_t k = axes.size();
  std::vector<double> tol = opts.tol;
  if (tol.empty())
    for (const auto& ax : axes)
      tol.push_back(ax.values.empty() ? 1e-3 * (ax.hi - ax.lo) : ax.step());
  if (tol.size() != k) throw InvalidInput("CD-GSS tolerance per axis mismatch");
  std::vector<std::size_t> order = opts.order;
  if (order.empty())
    for (std::size_t i = k; i-- > 0;) order.push_back(i);
  for (std::size_t c : order)
    if (c >= k) throw InvalidInput("CD-GSS coordinate order out of range");

  GSSResult out;
  struct Abort {};
  auto record = [&](const ConfigPoint& p, std::size_t coord, int pass,
                    std::size_t line) {
    const std::size_t step = out.history.size() + 1;
    double v = 0.0;
    try {
      v = objective(p, step);
    } catch (const std::exception& e) {
      out.aborted = true;
      out.abort_reason =
          "objective failed at step " + std::to_string(step) + ": " + e.what();
      throw Abort{};
    }
    out.history.push_back({step, p, v, coord, pass, line});
    return v;
  };

  std::mt19937_64 rng(derive_seed({opts.seed, 0x677373ULL}));
  std::vector<double> x(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_real_distribution<double> u(axes[i].lo, axes[i].hi);
    x[i] = axes[i].snap(u(rng));
  }

  try {
    double current = record(ConfigPoint(x), order.front(), 0, 0);
    std::size_t line = 0;
    for (int pass = 0; pass < opts.passes; ++pass) {
      for (std::size_t coord : order) {
        const int remaining =
            opts.max_evaluations - static_cast<int>(out.history.size());
        if (remaining <= 0) break;
        ++line;
        if (line > 1) out.switch_steps.push_back(out.history.size() + 1);
        auto f = [&](double v) {
          std::vector<double> probe = x;
          probe[coord] = v;
          return record(ConfigPoint(std::move(probe)), coord, pass, line);
        };
        const LineSearchResult r = golden_section(
            f, axes[coord], tol[coord], std::min(opts.line_budget, remaining));
        if (r.evaluations > 0 && r.best_value > current) {
          x[coord] = r.best_x;
          current = r.best_value;
        }
      }
    }
  } catch (const Abort&) {
  }

  if (!out.history.empty()) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < out.history.size(); ++i)
      if (out.history[i].observed > out.history[arg].observed) arg = i;
    out.best = out.history[arg].point;
    out.best_value = out.history[arg].observed;
  }
  return out;
}

}  // namespace bogp
