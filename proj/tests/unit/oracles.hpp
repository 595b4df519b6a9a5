#pragma once
// Reference formulas written directly from the closed forms, sharing no code
// with the library. Explicit inverses and determinants on purpose.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

struct Pt {
  std::vector<double> x;
  double t = 0.0;
};

// family: 0 rbf, 1 matern, 2 product(matern x ess)
struct Kern {
  int family = 1;
  double amp = 1.0, rbf_b = 1.0, nu = 2.5;
  std::vector<double> ell;
  double period = 1.0, ell_ess = 1.0;
};

inline double k(const Kern& s, const Pt& p, const Pt& q) {
  if (s.family == 0) {
    double r2 = 0;
    for (std::size_t i = 0; i < p.x.size(); ++i) r2 += (p.x[i] - q.x[i]) * (p.x[i] - q.x[i]);
    return s.amp * std::exp(-r2 / (2 * s.rbf_b * s.rbf_b));
  }
  double d2 = 0;
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    const double u = (p.x[i] - q.x[i]) / s.ell[i];
    d2 += u * u;
  }
  const double d = std::sqrt(d2);
  double m;
  if (s.nu == 0.5) m = std::exp(-d);
  else if (s.nu == 1.5) m = (1 + std::sqrt(3.0) * d) * std::exp(-std::sqrt(3.0) * d);
  else m = (1 + std::sqrt(5.0) * d + 5 * d * d / 3) * std::exp(-std::sqrt(5.0) * d);
  double v = s.amp * m;
  if (s.family == 2) {
    const double sn = std::sin(std::numbers::pi * std::abs(p.t - q.t) / s.period);
    v *= std::exp(-2 * sn * sn / (s.ell_ess * s.ell_ess));
  }
  return v;
}

struct Post {
  double mean, std;
};

// Joint Gaussian of (f(q), o) conditioned on o, via the full block matrix.
inline Post condition(const Kern& s, double sigma, const std::vector<Pt>& X,
                      const std::vector<double>& y, const std::vector<double>& prior_o,
                      double prior_q, const Pt& q) {
  const std::size_t n = X.size();
  Eigen::MatrixXd J(n + 1, n + 1);
  std::vector<Pt> all = X;
  all.push_back(q);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j) J(i, j) = k(s, all[i], all[j]);
  for (std::size_t i = 0; i < n; ++i) J(i, i) += sigma * sigma;
  const Eigen::MatrixXd Soo = J.topLeftCorner(n, n);
  const Eigen::VectorXd Sfo = J.block(n, 0, 1, n).transpose();
  const Eigen::MatrixXd inv = Soo.fullPivLu().inverse();
  Eigen::VectorXd r(n);
  for (std::size_t i = 0; i < n; ++i) r(i) = y[i] - prior_o[i];
  const double mean = prior_q + Sfo.dot(inv * r);
  const double var = J(n, n) - Sfo.dot(inv * Sfo);
  return {mean, std::sqrt(std::max(var, 0.0))};
}

inline double log_density(const Kern& s, double sigma, const std::vector<Pt>& X,
                          const std::vector<double>& y, const std::vector<double>& prior_o) {
  const std::size_t n = X.size();
  Eigen::MatrixXd S(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) S(i, j) = k(s, X[i], X[j]) + (i == j ? sigma * sigma : 0);
  Eigen::VectorXd r(n);
  for (std::size_t i = 0; i < n; ++i) r(i) = y[i] - prior_o[i];
  return -0.5 * r.dot(S.inverse() * r) - 0.5 * std::log(S.determinant()) -
         0.5 * static_cast<double>(n) * std::log(2 * std::numbers::pi);
}

}  // namespace oracle
