// Compiled with -mavx2 -mfma on x86-64; only called after a CPUID check.
#include <cmath>
#include <vector>

#include "bogp/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define BOGP_HAVE_AVX2 1
#else
#define BOGP_HAVE_AVX2 0
#endif

namespace bogp::simd::avx2 {

#if BOGP_HAVE_AVX2

bool compiled() { return true; }

void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out) {
  const std::size_t na = a.size() / dim;
  const std::size_t nb = b.size() / dim;
  // Transpose b so four consecutive points load as one vector.
  std::vector<double> bt(dim * nb);
  for (std::size_t j = 0; j < nb; ++j)
    for (std::size_t d = 0; d < dim; ++d) bt[d * nb + j] = b[j * dim + d];

  const std::size_t nb4 = nb - nb % 4;
  for (std::size_t i = 0; i < na; ++i) {
    const double* ai = a.data() + i * dim;
    double* row = out.data() + i * nb;
    for (std::size_t j = 0; j < nb4; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t d = 0; d < dim; ++d) {
        const __m256d av = _mm256_set1_pd(ai[d]);
        const __m256d bv = _mm256_loadu_pd(bt.data() + d * nb + j);
        const __m256d s = _mm256_set1_pd(inv_scale[d]);
        const __m256d diff = _mm256_mul_pd(_mm256_sub_pd(av, bv), s);
        acc = _mm256_fmadd_pd(diff, diff, acc);
      }
      _mm256_storeu_pd(row + j, acc);
    }
    for (std::size_t j = nb4; j < nb; ++j) {
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
  const std::size_t n4 = n - n % 4;
  const __m256d av = _mm256_set1_pd(alpha);
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x.data() + i);
    const __m256d yv = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(av, xv, yv));
  }
  for (std::size_t i = n4; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
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

}  // namespace bogp::simd::avx2
