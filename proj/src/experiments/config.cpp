#include "bogp/experiments/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "bogp/errors.hpp"
#include "json.hpp"

namespace bogp::exp {

using nlohmann::json;

namespace {

constexpr const char* kCommonDefaults = R"({
  "scenario": {
    "n_sites": 7, "isd_m": 200.0, "carrier_hz": 3.5e9, "n_prb": 100,
    "prb_bandwidth_hz": 180000.0, "p_cmax_dbm": 23.0, "noise_figure_db": 5.0,
    "noise_density_dbm_hz": -174.0, "ues_per_cell": 100, "indoor_fraction": 0.8,
    "min_distance_m": 10.0, "wraparound": true, "seed": 1
  },
  "prior_scenario": {
    "n_sites": 1, "ues_per_cell": 30, "seed": 101
  },
  "channel": {
    "h_bs": 10.0, "h_ut": 1.5, "shadow_los_db": 4.0, "shadow_nlos_db": 7.82,
    "indoor_wall_loss_db": 12.7, "indoor_loss_per_m": 0.5, "indoor_depth_max": 25.0,
    "antenna_max_gain_dbi": 8.0, "antenna_beamwidth_deg": 65.0,
    "antenna_front_back_db": 30.0
  },
  "utility": {"r": 1.0, "snapshots": 16, "ues_per_cell": 4},
  "surface_seed": 7,
  "loop": {
    "max_steps": 30, "termination_epsilon": 0.0, "refit_every": 1,
    "fit_restarts": 3, "window_size": null, "fit_amplitude": true,
    "fit_noise": true, "fit_period": false
  },
  "acquisition": {
    "kind": "ei", "xi": 0.0, "beta": 1.0, "beta_schedule": [],
    "kg_fantasies": 128, "incumbent": "best_posterior_mean"
  },
  "kernel": {
    "family": "matern", "nu": 0.5, "lengthscales": [50.0, 0.22123893805309736],
    "amplitude": 1000.0, "noise_std": 1.0
  },
  "prior": {"kind": "constant", "value": 0.0},
  "dynamic": {
    "load_schedule": [4, 16], "periods": [1.0, 2.0], "parallel_static": true,
    "ess_lengthscale": 1.0, "max_steps": 50, "window_size": 64,
    "kernel": {"nu": 2.5}
  },
  "baseline": {"passes": 2, "line_budget": 12, "max_evaluations": 30},
  "build_prior": {"subsample": null, "transform": "none", "constant": 0.0}
})";

constexpr const char* kSmallOverlay = R"({
  "seeds": "1..4",
  "scenario": {"n_sites": 3}
})";

constexpr const char* kPaperOverlay = R"({
  "seeds": "1..16",
  "scenario": {"n_sites": 7}
})";

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail("'" + section + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) fail("unknown key '" + section + "." + k + "'");
}

template <class T>
T get(const json& obj, const std::string& section, const char* key) {
  if (!obj.contains(key)) fail("missing key '" + section + "." + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail("key '" + section + "." + key + "' has the wrong type");
  }
}

std::optional<std::size_t> get_optional_size(const json& obj, const std::string& section,
                                             const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const auto v = get<long long>(obj, section, key);
  if (v < 1) fail("'" + section + "." + key + "' must be >= 1 or null");
  return static_cast<std::size_t>(v);
}

PriorTransform parse_transform(const std::string& s, const std::string& where) {
  if (s == "none") return PriorTransform::kNone;
  if (s == "mirror") return PriorTransform::kMirror;
  if (s == "constant") return PriorTransform::kConstant;
  fail("'" + where + "' must be none, mirror or constant");
}

olpc::ScenarioConfig parse_scenario(const json& s, const json& ch,
                                    const std::string& section) {
  check_keys(s, section,
             {"n_sites", "isd_m", "carrier_hz", "n_prb", "prb_bandwidth_hz",
              "p_cmax_dbm", "noise_figure_db", "noise_density_dbm_hz", "ues_per_cell",
              "indoor_fraction", "min_distance_m", "wraparound", "seed"});
  check_keys(ch, "channel",
             {"h_bs", "h_ut", "shadow_los_db", "shadow_nlos_db", "indoor_wall_loss_db",
              "indoor_loss_per_m", "indoor_depth_max", "antenna_max_gain_dbi",
              "antenna_beamwidth_deg", "antenna_front_back_db"});
  olpc::ScenarioConfig c;
  c.n_sites = get<int>(s, section, "n_sites");
  c.isd_m = get<double>(s, section, "isd_m");
  c.carrier_hz = get<double>(s, section, "carrier_hz");
  c.n_prb = get<int>(s, section, "n_prb");
  c.prb_bandwidth_hz = get<double>(s, section, "prb_bandwidth_hz");
  c.p_cmax_dbm = get<double>(s, section, "p_cmax_dbm");
  c.noise_figure_db = get<double>(s, section, "noise_figure_db");
  c.noise_density_dbm_hz = get<double>(s, section, "noise_density_dbm_hz");
  c.ues_per_cell = get<int>(s, section, "ues_per_cell");
  c.indoor_fraction = get<double>(s, section, "indoor_fraction");
  c.min_distance_m = get<double>(s, section, "min_distance_m");
  c.wraparound = get<bool>(s, section, "wraparound");
  c.seed = get<std::uint64_t>(s, section, "seed");
  auto& m = c.channel;
  m.h_bs = get<double>(ch, "channel", "h_bs");
  m.h_ut = get<double>(ch, "channel", "h_ut");
  m.shadow_los_db = get<double>(ch, "channel", "shadow_los_db");
  m.shadow_nlos_db = get<double>(ch, "channel", "shadow_nlos_db");
  m.indoor_wall_loss_db = get<double>(ch, "channel", "indoor_wall_loss_db");
  m.indoor_loss_per_m = get<double>(ch, "channel", "indoor_loss_per_m");
  m.indoor_depth_max = get<double>(ch, "channel", "indoor_depth_max");
  m.antenna_max_gain_dbi = get<double>(ch, "channel", "antenna_max_gain_dbi");
  m.antenna_beamwidth_deg = get<double>(ch, "channel", "antenna_beamwidth_deg");
  m.antenna_front_back_db = get<double>(ch, "channel", "antenna_front_back_db");
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    fail(section + ": " + e.what());
  }
  return c;
}

KernelSpec parse_kernel(const json& k) {
  check_keys(k, "kernel", {"family", "nu", "lengthscales", "amplitude", "noise_std", "rbf_scale"});
  const auto family = get<std::string>(k, "kernel", "family");
  const double amp = get<double>(k, "kernel", "amplitude");
  const double noise = get<double>(k, "kernel", "noise_std");
  KernelSpec spec;
  if (family == "matern") {
    spec = KernelSpec::matern(get<double>(k, "kernel", "nu"),
                              get<std::vector<double>>(k, "kernel", "lengthscales"), amp,
                              noise);
  } else if (family == "rbf") {
    spec = KernelSpec::rbf(amp, get<double>(k, "kernel", "rbf_scale"), noise);
  } else {
    fail("kernel.family must be matern or rbf");
  }
  try {
    spec.validate();
  } catch (const InvalidInput& e) {
    fail(std::string("kernel: ") + e.what());
  }
  if (spec.family == KernelFamily::kMatern && spec.params.matern_lengthscales.size() != 2)
    fail("kernel.lengthscales needs one entry per coordinate (alpha, p0)");
  return spec;
}

AcquisitionSpec parse_acquisition(const json& a) {
  check_keys(a, "acquisition",
             {"kind", "xi", "beta", "beta_schedule", "kg_fantasies", "incumbent"});
  AcquisitionSpec s;
  const auto kind = get<std::string>(a, "acquisition", "kind");
  if (kind == "ei") s.kind = AcquisitionKind::kEI;
  else if (kind == "kg") s.kind = AcquisitionKind::kKG;
  else if (kind == "ucb") s.kind = AcquisitionKind::kUCB;
  else fail("acquisition.kind must be ei, kg or ucb");
  s.ei_xi = get<double>(a, "acquisition", "xi");
  s.ucb_beta = get<double>(a, "acquisition", "beta");
  s.ucb_beta_schedule = get<std::vector<double>>(a, "acquisition", "beta_schedule");
  s.kg_fantasies = get<int>(a, "acquisition", "kg_fantasies");
  const auto inc = get<std::string>(a, "acquisition", "incumbent");
  if (inc == "best_posterior_mean") s.incumbent = IncumbentRule::kBestPosteriorMean;
  else if (inc == "best_observation") s.incumbent = IncumbentRule::kBestNoisyObs;
  else fail("acquisition.incumbent must be best_posterior_mean or best_observation");
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    fail(std::string("acquisition: ") + e.what());
  }
  return s;
}

LoopConfig parse_loop(const json& l, const AcquisitionSpec& acq) {
  check_keys(l, "loop",
             {"max_steps", "termination_epsilon", "refit_every", "fit_restarts",
              "window_size", "fit_amplitude", "fit_noise", "fit_period"});
  LoopConfig c;
  c.acq = acq;
  c.max_steps = get<int>(l, "loop", "max_steps");
  if (l.at("termination_epsilon").is_string() &&
      l.at("termination_epsilon").get<std::string>() == "inf")
    c.termination_epsilon = std::numeric_limits<double>::infinity();
  else
    c.termination_epsilon = get<double>(l, "loop", "termination_epsilon");
  c.refit_every = get<int>(l, "loop", "refit_every");
  c.fit_restarts = get<int>(l, "loop", "fit_restarts");
  c.window_size = get_optional_size(l, "loop", "window_size");
  c.fit.fit_amplitude = get<bool>(l, "loop", "fit_amplitude");
  c.fit.fit_noise = get<bool>(l, "loop", "fit_noise");
  c.fit.fit_period = get<bool>(l, "loop", "fit_period");
  if (c.max_steps < 1) fail("loop.max_steps must be >= 1");
  if (c.refit_every < 1) fail("loop.refit_every must be >= 1");
  if (c.fit_restarts < 0) fail("loop.fit_restarts must be >= 0");
  if (!(c.termination_epsilon >= 0.0)) fail("loop.termination_epsilon must be >= 0");
  return c;
}

PriorSource parse_prior(const json& p) {
  check_keys(p, "prior", {"kind", "value", "path", "subsample", "transform"});
  PriorSource s;
  const auto kind = get<std::string>(p, "prior", "kind");
  if (kind == "constant") {
    s.kind = PriorSource::Kind::kConstant;
    if (p.contains("value")) s.value = get<double>(p, "prior", "value");
  } else if (kind == "file") {
    s.kind = PriorSource::Kind::kFile;
    s.path = get<std::string>(p, "prior", "path");
    if (!std::ifstream(s.path)) fail("prior file not found: " + s.path);
  } else if (kind == "surface") {
    s.kind = PriorSource::Kind::kSurface;
    s.subsample = get_optional_size(p, "prior", "subsample");
    if (s.subsample && *s.subsample < 4) fail("prior.subsample must be >= 4");
    if (p.contains("transform"))
      s.transform = parse_transform(get<std::string>(p, "prior", "transform"), "prior.transform");
    if (s.transform == PriorTransform::kConstant)
      fail("prior.transform for a surface prior must be none or mirror");
  } else {
    fail("prior.kind must be constant, file or surface");
  }
  return s;
}

json merged_defaults(std::string_view profile) {
  json base = json::parse(kCommonDefaults);
  base.merge_patch(json::parse(profile_defaults(profile)));
  return base;
}

}  // namespace

std::string profile_defaults(std::string_view profile) {
  if (profile == "small") return kSmallOverlay;
  if (profile == "paper") return kPaperOverlay;
  fail("unknown profile '" + std::string(profile) + "' (expected small or paper)");
}

std::vector<std::uint64_t> parse_seed_range(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      fail("bad seed list '" + std::string(text) + "' (expected a..b)");
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) return {parse_int(text)};
  const auto a = parse_int(text.substr(0, dots));
  const auto b = parse_int(text.substr(dots + 2));
  if (b < a) fail("seed range '" + std::string(text) + "' is empty");
  if (b - a >= 100000) fail("seed range '" + std::string(text) + "' is too long");
  std::vector<std::uint64_t> out;
  for (auto s = a; s <= b; ++s) out.push_back(s);
  return out;
}

ExperimentConfig parse_config(std::string_view config_text, std::string_view profile) {
  json j = merged_defaults(profile);
  if (!config_text.empty()) {
    json user;
    try {
      user = json::parse(config_text);
    } catch (const json::parse_error& e) {
      fail(std::string("config is not valid JSON: ") + e.what());
    }
    if (!user.is_object()) fail("config must be a JSON object");
    j.merge_patch(user);
  }
  check_keys(j, "config",
             {"seeds", "scenario", "prior_scenario", "channel", "utility", "surface_seed",
              "loop", "acquisition", "kernel", "prior", "dynamic", "baseline",
              "build_prior"});

  ExperimentConfig c;
  c.profile = std::string(profile);
  c.scenario = parse_scenario(j.at("scenario"), j.at("channel"), "scenario");
  json ps = j.at("scenario");
  ps.merge_patch(j.at("prior_scenario"));
  c.prior_scenario = parse_scenario(ps, j.at("channel"), "prior_scenario");

  const json& u = j.at("utility");
  check_keys(u, "utility", {"r", "snapshots", "ues_per_cell"});
  c.utility.r = get<double>(u, "utility", "r");
  c.utility.snapshots = get<int>(u, "utility", "snapshots");
  c.utility.ues_per_cell = get<int>(u, "utility", "ues_per_cell");
  try {
    c.utility.validate();
  } catch (const InvalidInput& e) {
    fail(std::string("utility: ") + e.what());
  }
  c.surface_seed = get<std::uint64_t>(j, "config", "surface_seed");

  c.kernel = parse_kernel(j.at("kernel"));
  c.loop = parse_loop(j.at("loop"), parse_acquisition(j.at("acquisition")));
  c.prior = parse_prior(j.at("prior"));

  const json& d = j.at("dynamic");
  check_keys(d, "dynamic",
             {"load_schedule", "periods", "parallel_static", "ess_lengthscale",
              "max_steps", "window_size", "kernel"});
  {
    json dk = j.at("kernel");
    if (d.contains("kernel")) {
      if (!d.at("kernel").is_object()) fail("dynamic.kernel must be an object");
      dk.merge_patch(d.at("kernel"));
    }
    c.dynamic.kernel = parse_kernel(dk);
  }
  c.dynamic.load_schedule = get<std::vector<int>>(d, "dynamic", "load_schedule");
  c.dynamic.periods = get<std::vector<double>>(d, "dynamic", "periods");
  c.dynamic.parallel_static = get<bool>(d, "dynamic", "parallel_static");
  c.dynamic.ess_lengthscale = get<double>(d, "dynamic", "ess_lengthscale");
  c.dynamic.max_steps = get<int>(d, "dynamic", "max_steps");
  c.dynamic.window_size = get_optional_size(d, "dynamic", "window_size");
  if (c.dynamic.load_schedule.empty()) fail("dynamic.load_schedule is empty");
  for (int k : c.dynamic.load_schedule)
    if (k < 2 || k > 16) fail("dynamic.load_schedule entries must be in [2, 16]");
  for (double p : c.dynamic.periods)
    if (!(p > 0.0)) fail("dynamic.periods entries must be > 0");
  if (!(c.dynamic.ess_lengthscale > 0.0)) fail("dynamic.ess_lengthscale must be > 0");
  if (c.dynamic.max_steps < 1) fail("dynamic.max_steps must be >= 1");

  const json& b = j.at("baseline");
  check_keys(b, "baseline", {"passes", "line_budget", "max_evaluations"});
  c.baseline.passes = get<int>(b, "baseline", "passes");
  c.baseline.line_budget = get<int>(b, "baseline", "line_budget");
  c.baseline.max_evaluations = get<int>(b, "baseline", "max_evaluations");
  if (c.baseline.passes < 1 || c.baseline.line_budget < 1 || c.baseline.max_evaluations < 1)
    fail("baseline passes, line_budget and max_evaluations must be >= 1");

  const json& bp = j.at("build_prior");
  check_keys(bp, "build_prior", {"subsample", "transform", "constant"});
  c.build_prior.subsample = get_optional_size(bp, "build_prior", "subsample");
  if (c.build_prior.subsample && *c.build_prior.subsample < 4)
    fail("build_prior.subsample must be >= 4");
  c.build_prior.transform =
      parse_transform(get<std::string>(bp, "build_prior", "transform"), "build_prior.transform");
  c.build_prior.constant = get<double>(bp, "build_prior", "constant");

  if (!j.contains("seeds")) fail("missing key 'seeds'");
  const json& s = j.at("seeds");
  if (s.is_string()) {
    c.seeds = parse_seed_range(s.get<std::string>());
  } else if (s.is_array()) {
    try {
      c.seeds = s.get<std::vector<std::uint64_t>>();
    } catch (const json::exception&) {
      fail("seeds must be integers");
    }
  } else {
    fail("seeds must be \"a..b\" or a list");
  }
  if (c.seeds.empty()) fail("seed list is empty");

  c.resolved_json = j.dump();
  return c;
}

ExperimentConfig load_config(const std::optional<std::string>& path,
                             std::string_view profile,
                             const std::optional<std::string>& seeds) {
  std::string text;
  if (path) {
    std::ifstream in(*path);
    if (!in) fail("cannot read config file: " + *path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (seeds) {
    json j = text.empty() ? json::object() : json::parse(text, nullptr, false);
    if (j.is_discarded()) fail("config is not valid JSON: " + *path);
    if (!j.is_object()) fail("config must be a JSON object");
    (void)parse_seed_range(*seeds);
    j["seeds"] = *seeds;
    text = j.dump();
  }
  return parse_config(text, profile);
}

}  // namespace bogp::exp
