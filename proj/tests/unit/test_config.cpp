#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bogp/errors.hpp"
#include "bogp/experiments/config.hpp"
#include "doctest.h"

using namespace bogp;
using namespace bogp::exp;

TEST_CASE("seed ranges") {
  CHECK(parse_seed_range("3") == std::vector<std::uint64_t>{3});
  CHECK(parse_seed_range("1..4") == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(parse_seed_range("7..7") == std::vector<std::uint64_t>{7});
  CHECK_THROWS_AS(parse_seed_range("4..1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_range("a..b"), ConfigError);
  CHECK_THROWS_AS(parse_seed_range(""), ConfigError);
  CHECK_THROWS_AS(parse_seed_range("1..2x"), ConfigError);
}

TEST_CASE("profiles") {
  const auto small = parse_config("", "small");
  const auto full = parse_config("", "paper");
  CHECK(small.scenario.n_sites == 3);
  CHECK(full.scenario.n_sites == 7);
  CHECK(small.seeds.size() == 4);
  CHECK(full.seeds.size() == 16);
  CHECK(full.loop.max_steps == 30);
  CHECK(full.loop.acq.kind == AcquisitionKind::kEI);
  CHECK(full.prior.kind == PriorSource::Kind::kConstant);
  CHECK(full.dynamic.window_size == std::optional<std::size_t>(64));
  CHECK(full.dynamic.load_schedule == std::vector<int>{4, 16});
  CHECK_THROWS_AS(parse_config("", "huge"), ConfigError);
}

TEST_CASE("overrides and errors") {
  CHECK_THROWS_AS(parse_config(R"({"nope": 1})", "small"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"loop": {"maxsteps": 3}})", "small"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json", "small"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1]", "small"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"loop": {"max_steps": "x"}})", "small"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": {"n_sites": 5}})", "small"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"dynamic": {"load_schedule": [1]}})", "small"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"build_prior": {"subsample": 3}})", "small"), ConfigError);

  const auto c = parse_config(R"({"loop": {"termination_epsilon": "inf"}, "seeds": [5, 9]})", "small");
  CHECK(std::isinf(c.loop.termination_epsilon));
  CHECK(c.seeds == std::vector<std::uint64_t>{5, 9});
  CHECK(c.scenario.n_sites == 3);
}

TEST_CASE("dynamic kernel overlays the top-level kernel") {
  const auto c = parse_config(R"({"kernel": {"amplitude": 7.0}})", "small");
  CHECK(c.kernel.params.amplitude == 7.0);
  CHECK(c.dynamic.kernel.params.amplitude == 7.0);
  CHECK(c.kernel.params.matern_nu == 0.5);
  CHECK(c.dynamic.kernel.params.matern_nu == 2.5);
  const auto d = parse_config(R"({"dynamic": {"kernel": {"nu": 1.5}}})", "small");
  CHECK(d.dynamic.kernel.params.matern_nu == 1.5);
  CHECK_THROWS_AS(parse_config(R"({"dynamic": {"kernel": 3}})", "small"), ConfigError);
}

TEST_CASE("load_config reads files and applies the seed flag") {
  const std::string path = "bogp_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"seeds": "2..3", "utility": {"r": 2.0}})";
  }
  const auto a = load_config(path, "small", std::nullopt);
  CHECK(a.seeds == std::vector<std::uint64_t>{2, 3});
  CHECK(a.utility.r == 2.0);
  const auto b = load_config(path, "small", std::string("10..12"));
  CHECK(b.seeds == std::vector<std::uint64_t>{10, 11, 12});
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config(std::string("/nonexistent/x.json"), "small", std::nullopt), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, "small", std::string("x")), ConfigError);
}

TEST_CASE("shipped example configs parse under both profiles") {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(BOGP_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    for (const char* profile : {"small", "paper"}) {
      CAPTURE(e.path().string());
      CHECK_NOTHROW(load_config(e.path().string(), profile, std::nullopt));
    }
    ++n;
  }
  CHECK(n >= 5);
}
