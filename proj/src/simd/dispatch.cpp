#include <atomic>
#include <cstdlib>
#include <string>

#include "bogp/errors.hpp"
#include "bogp/simd/kernels.hpp"

namespace bogp::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return avx2::compiled() && __builtin_cpu_supports("avx2") &&
         __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return cpu_has_avx2();
    case Isa::kNeon:
      return neon::compiled();
  }
  return false;
}

Isa initial_isa() {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("BOGP_SIMD")) {
    const std::string want(env);
    if (want == "scalar") isa = Isa::kScalar;
    if (want == "avx2" && supported(Isa::kAvx2)) isa = Isa::kAvx2;
    if (want == "neon" && supported(Isa::kNeon)) isa = Isa::kNeon;
  }
  return isa;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void check_distance_args(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out) {
  if (dim == 0 || a.size() % dim != 0 || b.size() % dim != 0 ||
      inv_scale.size() != dim) {
    throw InvalidInput("scaled_sq_distances: inconsistent dimensions");
  }
  if (out.size() != (a.size() / dim) * (b.size() / dim)) {
    throw InvalidInput("scaled_sq_distances: output has wrong size");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

Isa detected_isa() {
  if (supported(Isa::kAvx2)) return Isa::kAvx2;
  if (supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::kScalar};
  if (supported(Isa::kAvx2)) out.push_back(Isa::kAvx2);
  if (supported(Isa::kNeon)) out.push_back(Isa::kNeon);
  return out;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!supported(isa)) {
    throw InvalidInput("SIMD variant not available: " +
                       std::string(isa_name(isa)));
  }
  active().store(isa, std::memory_order_relaxed);
}

void scaled_sq_distances(Isa isa, std::span<const double> a,
                         std::span<const double> b, std::size_t dim,
                         std::span<const double> inv_scale,
                         std::span<double> out) {
  check_distance_args(a, b, dim, inv_scale, out);
  switch (isa) {
    case Isa::kAvx2:
      return avx2::scaled_sq_distances(a, b, dim, inv_scale, out);
    case Isa::kNeon:
      return neon::scaled_sq_distances(a, b, dim, inv_scale, out);
    case Isa::kScalar:
      break;
  }
  scalar::scaled_sq_distances(a, b, dim, inv_scale, out);
}

void axpy(Isa isa, double alpha, std::span<const double> x,
          std::span<double> y) {
  if (x.size() != y.size()) throw InvalidInput("axpy: length mismatch");
  switch (isa) {
    case Isa::kAvx2:
      return avx2::axpy(alpha, x, y);
    case Isa::kNeon:
      return neon::axpy(alpha, x, y);
    case Isa::kScalar:
      break;
  }
  scalar::axpy(alpha, x, y);
}

void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out) {
  scaled_sq_distances(active_isa(), a, b, dim, inv_scale, out);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  axpy(active_isa(), alpha, x, y);
}

}  // namespace bogp::simd
