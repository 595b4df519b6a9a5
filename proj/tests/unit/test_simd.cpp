#include <random>
#include <vector>

#include "bogp/errors.hpp"
#include "bogp/simd/kernels.hpp"
#include "doctest.h"

using namespace bogp;
using namespace bogp::simd;

namespace {

std::vector<double> randoms(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar distances match the definition") {
  const std::vector<double> a = {0.0, 0.0, 1.0, 2.0};
  const std::vector<double> b = {3.0, 4.0};
  const std::vector<double> inv = {1.0, 0.5};
  std::vector<double> out(2);
  scalar::scaled_sq_distances(a, b, 2, inv, out);
  CHECK(out[0] == 9.0 + 4.0);
  CHECK(out[1] == 4.0 + 1.0);
  std::vector<double> y = {1.0, 2.0, 3.0};
  scalar::axpy(2.0, std::vector<double>{1.0, 1.0, 1.0}, y);
  CHECK(y == std::vector<double>{3.0, 4.0, 5.0});
}

TEST_CASE("vector variants are bitwise equal to scalar") {
  const auto isas = available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == Isa::kScalar);
  std::mt19937_64 rng(17);
  for (std::size_t dim : {1u, 2u, 3u, 5u}) {
    for (std::size_t na : {1u, 3u, 7u}) {
      for (std::size_t nb : {1u, 4u, 5u, 13u, 64u}) {
        const auto a = randoms(rng, na * dim);
        const auto b = randoms(rng, nb * dim);
        auto inv = randoms(rng, dim);
        std::vector<double> ref(na * nb), got(na * nb);
        scaled_sq_distances(Isa::kScalar, a, b, dim, inv, ref);
        for (Isa isa : isas) {
          scaled_sq_distances(isa, a, b, dim, inv, got);
          CHECK(got == ref);
        }
      }
    }
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 100u, 1027u}) {
    const auto x = randoms(rng, n);
    const auto y0 = randoms(rng, n);
    auto ref = y0;
    axpy(Isa::kScalar, 0.37, x, ref);
    for (Isa isa : isas) {
      auto y = y0;
      axpy(isa, 0.37, x, y);
      CHECK(y == ref);
    }
  }
}

TEST_CASE("dispatch selection") {
  const Isa before = active_isa();
  set_active_isa(Isa::kScalar);
  CHECK(active_isa() == Isa::kScalar);
  bool neon_ok = false, avx_ok = false;
  for (Isa i : available_isas()) {
    neon_ok |= i == Isa::kNeon;
    avx_ok |= i == Isa::kAvx2;
  }
  if (!neon_ok) CHECK_THROWS_AS(set_active_isa(Isa::kNeon), InvalidInput);
  if (!avx_ok) CHECK_THROWS_AS(set_active_isa(Isa::kAvx2), InvalidInput);
  set_active_isa(before);
  CHECK(isa_name(Isa::kScalar) == "scalar");
  std::vector<double> out(1);
  CHECK_THROWS(scaled_sq_distances(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}, 2,
                                   std::vector<double>{1.0, 1.0}, out));
}
