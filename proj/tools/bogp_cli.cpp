#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bogp/baselines/priors.hpp"
#include "bogp/errors.hpp"
#include "bogp/experiments/config.hpp"
#include "bogp/experiments/experiments.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace bogp;
using namespace bogp::exp;

namespace {

constexpr int kConfigError = 2;
constexpr int kRunFailure = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<std::string> config;
  std::optional<std::string> seeds;
  std::string out = "out";
  std::string profile = "paper";
};

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw IoError("write failed: " + path.string());
}

std::string timing_json(const Outcome& o, const std::string& config_json, double total) {
  nlohmann::json j;
  j["schema"] = "bogp-timing/1";
  j["command"] = o.command;
  j["config"] = nlohmann::json::parse(config_json);
  j["total_seconds"] = total;
  nlohmann::json v = nlohmann::json::object();
  for (const auto& [name, traces] : o.variants) {
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& t : traces) seeds.push_back({{"seed", t.seed}, {"seconds", t.wall_seconds}});
    v[name] = seeds;
  }
  j["variants"] = v;
  return j.dump(2) + "\n";
}

// "D=2" -> "D2" so variant names are safe directory names.
std::string dir_name(const std::string& variant) {
  std::string s;
  for (char c : variant)
    if (c != '=') s += c == '.' ? 'p' : c;
  return s;
}

int report(const Outcome& o, const ExperimentConfig& cfg, const fs::path& out, double seconds) {
  const bool with_load = o.command == "dynamic";
  for (const auto& [name, traces] : o.variants)
    for (const auto& t : traces) {
      std::ostringstream os;
      write_trace_csv(os, t, "bogp-trace/1", cfg.resolved_json, with_load);
      write_file(out / dir_name(name) / ("seed_" + std::to_string(t.seed) + ".csv"), os.str());
      if (t.aborted)
        std::cerr << "seed " << t.seed << " (" << name << ") aborted: " << t.abort_reason << "\n";
    }
  write_file(out / "summary.json", outcome_summary_json(o, cfg.resolved_json));
  write_file(out / "timing.json", timing_json(o, cfg.resolved_json, seconds));
  return o.any_aborted() ? kRunFailure : 0;
}

int run_command(const std::string& cmd, const Options& opt) {
  const ExperimentConfig cfg = load_config(opt.config, opt.profile, opt.seeds);
  const fs::path out(opt.out);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (cmd == "surface") {
    const olpc::NetworkScenario net(cfg.scenario);
    const auto tables = compute_surfaces(net, cfg.utility, cfg.surface_seed);
    std::ostringstream os;
    write_surface_csv(os, tables, cfg.resolved_json);
    write_file(out / "surface.csv", os.str());
    write_file(out / "surface_summary.json", surface_summary_json(tables, cfg.resolved_json));
    return 0;
  }
  if (cmd == "build-prior") {
    const PriorTable t = build_prior_table(cfg, cfg.build_prior.subsample,
                                           cfg.build_prior.transform, cfg.build_prior.constant);
    std::ostringstream os;
    write_prior_csv(os, t, cfg.resolved_json);
    write_file(out / "prior.csv", os.str());
    return 0;
  }
  Outcome o;
  if (cmd == "optimize") o = run_optimize(cfg);
  else if (cmd == "baseline") o = run_baseline(cfg);
  else o = run_dynamic_experiment(cfg);
  return report(o, cfg, out, elapsed());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BO with Gaussian processes for uplink OLPC tuning"};
  app.require_subcommand(1, 1);
  Options opt;
  const char* commands[][2] = {
      {"surface", "exhaustive utility surface over the OLPC grid (r = 0, 1, 2)"},
      {"optimize", "static BO per seed"},
      {"baseline", "CD-GSS per seed, paired objective seeding"},
      {"dynamic", "D=1, D=2 and parallel-static runs on the load schedule"},
      {"build-prior", "prior-mean table from the source network surface"}};
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", opt.config, "JSON config overlay")->check(CLI::ExistingFile);
    sub->add_option("--seeds", opt.seeds, "seed range a..b (inclusive)");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--profile", opt.profile, "built-in defaults")
        ->check(CLI::IsMember({"small", "paper"}))
        ->capture_default_str();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return run_command(cmd, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << "\n";
    return kRunFailure;
  }
}
