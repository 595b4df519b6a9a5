#include "bogp/gp/local_ascent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bogp/errors.hpp"

namespace bogp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const std::function<double(std::span<const double>)>& f,
                 const std::vector<double>& x, int& evals) {
  ++evals;
  const double v = f(x);
  return std::isfinite(v) ? v : kNegInf;
}

}  // namespace

AscentResult local_ascent(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> x0, std::span<const double> lower,
                          std::span<const double> upper,
                          const AscentOptions& opts) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw InvalidInput("local_ascent: bound size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw InvalidInput("local_ascent: empty box");
    x0[i] = std::clamp(x0[i], lower[i], upper[i]);
  }
  auto fd = [&](std::size_t i) {
    return opts.fd_step.size() == n ? opts.fd_step[i] : 1e-6;
  };
  auto cap = [&](std::size_t i) {
    return opts.max_step.size() == n ? opts.max_step[i]
                                     : std::numeric_limits<double>::infinity();
  };

  AscentResult res;
  res.x = x0;
  res.value = safe_eval(f, res.x, res.evaluations);
  if (res.value == kNegInf || n == 0) return res;

  auto gradient = [&](const std::vector<double>& x, double fx) {
    Eigen::VectorXd g(static_cast<Eigen::Index>(n));
    std::vector<double> probe = x;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = fd(i);
      const double up = std::min(x[i] + h, upper[i]);
      const double dn = std::max(x[i] - h, lower[i]);
      double fu = fx, fdn = fx;
      if (up > x[i]) {
        probe[i] = up;
        fu = safe_eval(f, probe, res.evaluations);
      }
      if (dn < x[i]) {
        probe[i] = dn;
        fdn = safe_eval(f, probe, res.evaluations);
      }
      probe[i] = x[i];
      const double width = (up > x[i] ? up : x[i]) - (dn < x[i] ? dn : x[i]);
      double gi = 0.0;
      if (width > 0.0 && std::isfinite(fu) && std::isfinite(fdn))
        gi = (fu - fdn) / width;
      else if (std::isfinite(fu) && up > x[i])
        gi = (fu - fx) / (up - x[i]);
      else if (std::isfinite(fdn) && dn < x[i])
        gi = (fx - fdn) / (x[i] - dn);
      g(static_cast<Eigen::Index>(i)) = gi;
    }
    return g;
  };

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(ni, ni);
  Eigen::VectorXd g = gradient(res.x, res.value);

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    // Coordinates pinned at a bound with the gradient pointing outwards.
    std::vector<bool> fixed(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      fixed[i] = (res.x[i] <= lower[i] && g(ii) < 0.0) ||
                 (res.x[i] >= upper[i] && g(ii) > 0.0);
    }
    Eigen::VectorXd gm = g;
    for (std::size_t i = 0; i < n; ++i)
      if (fixed[i]) gm(static_cast<Eigen::Index>(i)) = 0.0;
    if (gm.norm() == 0.0) break;

    Eigen::VectorXd d = h_inv * gm;
    for (std::size_t i = 0; i < n; ++i)
      if (fixed[i]) d(static_cast<Eigen::Index>(i)) = 0.0;
    if (!(d.dot(gm) > 0.0)) {
      h_inv.setIdentity();
      d = gm;
    }
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double di = std::abs(d(static_cast<Eigen::Index>(i)));
      if (di * scale > cap(i)) scale = cap(i) / di;
    }

    bool accepted = false;
    std::vector<double> xn(n);
    double fn = kNegInf;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t i = 0; i < n; ++i)
        xn[i] = std::clamp(res.x[i] + scale * d(static_cast<Eigen::Index>(i)),
                           lower[i], upper[i]);
      fn = safe_eval(f, xn, res.evaluations);
      double predicted = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        predicted += g(static_cast<Eigen::Index>(i)) * (xn[i] - res.x[i]);
      if (fn > res.value && fn >= res.value + 1e-4 * predicted) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;

    const double improvement = fn - res.value;
    Eigen::VectorXd s(ni);
    for (std::size_t i = 0; i < n; ++i)
      s(static_cast<Eigen::Index>(i)) = xn[i] - res.x[i];
    res.x = xn;
    res.value = fn;
    Eigen::VectorXd gn = gradient(res.x, res.value);
    // BFGS on -f: y = grad(-f)_new - grad(-f)_old.
    const Eigen::VectorXd y = g - gn;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(ni, ni);
      h_inv = (eye - rho * s * y.transpose()) * h_inv *
                  (eye - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
    g = gn;
    if (improvement < opts.value_tolerance * (1.0 + std::abs(res.value))) break;
  }
  return res;
}

}  // namespace bogp
