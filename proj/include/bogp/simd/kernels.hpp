#pragma once
// Data-parallel inner loops shared by the GP and the uplink simulator.
//
// Every kernel has a scalar reference implementation plus vector variants
// selected at runtime. The scalar versions use std::fma with the same
// accumulation order as the vector lanes, so all variants are bitwise
// identical on the same inputs.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bogp::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

// Best ISA supported by the running CPU (and compiled into this build).
Isa detected_isa();

// ISAs usable on this machine, scalar first.
std::vector<Isa> available_isas();

// Currently dispatched ISA. Starts as detected_isa(), unless the environment
// variable BOGP_SIMD=scalar|avx2|neon asks for something else.
Isa active_isa();

// Throws InvalidInput when the ISA is not available.
void set_active_isa(Isa isa);

// out[i * nb + j] = sum_d ((a[i,d] - b[j,d]) * inv_scale[d])^2
// a is (na x dim) and b is (nb x dim), both row-major.
void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace scalar

namespace avx2 {
bool compiled();
void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace avx2

namespace neon {
bool compiled();
void scaled_sq_distances(std::span<const double> a, std::span<const double> b,
                         std::size_t dim, std::span<const double> inv_scale,
                         std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
}  // namespace neon

// Explicit-ISA entry points, used by the equivalence tests.
void scaled_sq_distances(Isa isa, std::span<const double> a,
                         std::span<const double> b, std::size_t dim,
                         std::span<const double> inv_scale,
                         std::span<double> out);
void axpy(Isa isa, double alpha, std::span<const double> x,
          std::span<double> y);

}  // namespace bogp::simd
