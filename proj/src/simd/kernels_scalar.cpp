#include <cmath>

#include "bogp/simd/kernels.hpp"

namespace bogp::simd::scalar {

void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out) {
  const std::size_t na = a.size() / dim;
  const std::size_t nb = b.size() / dim;
  for (std::size_t i = 0; i < na; ++i) {
    const double* ai = a.data() + i * dim;
    double* row = out.data() + i * nb;
    for (std::size_t j = 0; j < nb; ++j) {
      const double* bj = b.data() + j * dim;
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = (ai[d] - bj[d]) * inv_scale[d];
        acc = std::fma(diff, diff, acc);
      }
      row[j] = acc;
    }
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

}  // namespace bogp::simd::scalar
