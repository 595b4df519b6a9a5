#include <cmath>
#include <vector>

#include "bogp/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#define BOGP_HAVE_NEON 1
#else
#define BOGP_HAVE_NEON 0
#endif

namespace bogp::simd::neon {

#if BOGP_HAVE_NEON

bool compiled() { return true; }

void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out) {
  const std::size_t na = a.size() / dim;
  const std::size_t nb = b.size() / dim;
  std::vector<double> bt(dim * nb);
  for (std::size_t j = 0; j < nb; ++j)
    for (std::size_t d = 0; d < dim; ++d) bt[d * nb + j] = b[j * dim + d];

  const std::size_t nb2 = nb - nb % 2;
  for (std::size_t i = 0; i < na; ++i) {
    const double* ai = a.data() + i * dim;
    double* row = out.data() + i * nb;
    for (std::size_t j = 0; j < nb2; j += 2) {
      float64x2_t acc = vdupq_n_f64(0.0);
      for (std::size_t d = 0; d < dim; ++d) {
        const float64x2_t av = vdupq_n_f64(ai[d]);
        const float64x2_t bv = vld1q_f64(bt.data() + d * nb + j);
        const float64x2_t diff =
            vmulq_f64(vsubq_f64(av, bv), vdupq_n_f64(inv_scale[d]));
        acc = vfmaq_f64(acc, diff, diff);
      }
      vst1q_f64(row + j, acc);
    }
    for (std::size_t j = nb2; j < nb; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = (ai[d] - bt[d * nb + j]) * inv_scale[d];
        acc = std::fma(diff, diff, acc);
      }
      row[j] = acc;
    }
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const std::size_t n2 = n - n % 2;
  const float64x2_t av = vdupq_n_f64(alpha);
  for (std::size_t i = 0; i < n2; i += 2) {
    const float64x2_t yv = vld1q_f64(y.data() + i);
    vst1q_f64(y.data() + i, vfmaq_f64(yv, av, vld1q_f64(x.data() + i)));
  }
  for (std::size_t i = n2; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

#else

bool compiled() { return false; }

void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out) {
  scalar::scaled_sq_distances(a, b, dim, inv_scale, out);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  scalar::axpy(alpha, x, y);
}

#endif

}  // namespace bogp::simd::neon
