#include "bogp/olpc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "bogp/errors.hpp"
#include "bogp/seeding.hpp"
#include "bogp/simd/kernels.hpp"

namespace bogp::olpc {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr int kSectors = 3;
constexpr double kSectorAzimuths[kSectors] = {30.0, 150.0, 270.0};

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

Vec2 rotate(Vec2 v, double deg) {
  const double c = std::cos(deg * std::numbers::pi / 180.0);
  const double s = std::sin(deg * std::numbers::pi / 180.0);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double wrap_deg(double a) {
  a = std::fmod(a + 180.0, 360.0);
  if (a < 0.0) a += 360.0;
  return a - 180.0;
}

}  // namespace

const std::vector<double>& alpha_values() {
  static const std::vector<double> v = {0.0, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  return v;
}

const std::vector<double>& p0_values() {
  static const std::vector<double> v = [] {
    std::vector<double> out;
    for (int p = -202; p <= 24; p += 2) out.push_back(p);
    return out;
  }();
  return v;
}

std::vector<OLPCConfig> config_grid() {
  std::vector<OLPCConfig> g;
  g.reserve(alpha_values().size() * p0_values().size());
  for (double a : alpha_values())
    for (double p : p0_values()) g.push_back({a, p});
  return g;
}

bool on_grid(const OLPCConfig& c) {
  const auto& av = alpha_values();
  const auto& pv = p0_values();
  return std::find(av.begin(), av.end(), c.alpha) != av.end() &&
         std::find(pv.begin(), pv.end(), c.p0) != pv.end();
}

std::size_t grid_index(const OLPCConfig& c) {
  const auto& av = alpha_values();
  const auto& pv = p0_values();
  const auto ia = std::find(av.begin(), av.end(), c.alpha);
  const auto ip = std::find(pv.begin(), pv.end(), c.p0);
  if (ia == av.end() || ip == pv.end())
    throw InvalidInput("OLPC configuration is not on the 3GPP grid");
  return static_cast<std::size_t>(ia - av.begin()) * pv.size() +
         static_cast<std::size_t>(ip - pv.begin());
}

ConfigPoint to_point(const OLPCConfig& c) { return ConfigPoint{c.alpha, c.p0}; }

OLPCConfig from_point(const ConfigPoint& p) {
  if (p.dim() != 2) throw InvalidInput("OLPC point must be (alpha, p0)");
  return {p[0], p[1]};
}

void ScenarioConfig::validate() const {
  if (n_sites != 1 && n_sites != 3 && n_sites != 7)
    throw InvalidInput("n_sites must be 1, 3 or 7");
  if (!(isd_m > 0.0)) throw InvalidInput("isd must be > 0");
  if (!(carrier_hz > 0.0)) throw InvalidInput("carrier frequency must be > 0");
  if (n_prb < 1) throw InvalidInput("n_prb must be >= 1");
  if (!(prb_bandwidth_hz > 0.0)) throw InvalidInput("PRB bandwidth must be > 0");
  if (!std::isfinite(p_cmax_dbm)) throw InvalidInput("P_CMAX must be finite");
  if (ues_per_cell < 1) throw InvalidInput("ues_per_cell must be >= 1");
  if (!(indoor_fraction >= 0.0 && indoor_fraction <= 1.0))
    throw InvalidInput("indoor fraction must be in [0, 1]");
  if (!(min_distance_m >= 0.0 && min_distance_m < isd_m / 2.0))
    throw InvalidInput("min distance must be in [0, isd/2)");
  if (!(channel.h_bs > 1.0 && channel.h_ut > 1.0))
    throw InvalidInput("antenna heights must exceed 1 m");
  if (!(channel.antenna_beamwidth_deg > 0.0))
    throw InvalidInput("antenna beamwidth must be > 0");
}

double umi_los_probability(double d2d_m) {
  if (d2d_m <= 18.0) return 1.0;
  return 18.0 / d2d_m + std::exp(-d2d_m / 36.0) * (1.0 - 18.0 / d2d_m);
}

double umi_pathloss_db(double d2d_m, double carrier_hz, double h_bs, double h_ut,
                       bool los) {
  const double dh = h_bs - h_ut;
  const double d3d = std::max(std::sqrt(d2d_m * d2d_m + dh * dh), 1.0);
  const double fc = carrier_hz / 1e9;
  const double d_bp = 4.0 * (h_bs - 1.0) * (h_ut - 1.0) * carrier_hz / kSpeedOfLight;
  double pl_los;
  if (d2d_m <= d_bp) {
    pl_los = 32.4 + 21.0 * std::log10(d3d) + 20.0 * std::log10(fc);
  } else {
    pl_los = 32.4 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc) -
             9.5 * std::log10(d_bp * d_bp + dh * dh);
  }
  if (los) return pl_los;
  const double pl_nlos = 35.3 * std::log10(d3d) + 22.4 + 21.3 * std::log10(fc) -
                         0.3 * (h_ut - 1.5);
  return std::max(pl_los, pl_nlos);
}

double sector_gain_dbi(const ChannelModel& ch, double angle_off_boresight_deg) {
  const double phi = wrap_deg(angle_off_boresight_deg) / ch.antenna_beamwidth_deg;
  return ch.antenna_max_gain_dbi - std::min(12.0 * phi * phi, ch.antenna_front_back_db);
}

NetworkScenario::NetworkScenario(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const double isd = cfg_.isd_m;
  const Vec2 a1{isd, 0.0};
  const Vec2 a2{isd / 2.0, isd * std::sqrt(3.0) / 2.0};
  Vec2 generator;
  switch (cfg_.n_sites) {
    case 1:
      sites_ = {{0.0, 0.0}};
      generator = a1;
      break;
    case 3:
      sites_ = {{0.0, 0.0}, a1, a2};
      generator = a1 + a2;
      break;
    default:
      sites_ = {{0.0, 0.0}, a1, a2, a2 - a1, -1.0 * a1, -1.0 * a2, a1 - a2};
      generator = 2.0 * a1 + a2;
      break;
  }
  if (cfg_.wraparound)
    for (int k = 0; k < 6; ++k) image_shifts_.push_back(rotate(generator, 60.0 * k));

  for (std::size_t s = 0; s < sites_.size(); ++s)
    for (double az : kSectorAzimuths)
      cells_.push_back({static_cast<int>(s), sites_[s], az});

  // UEs uniformly inside each site's hexagon.
  std::mt19937_64 rng(derive_seed({cfg_.seed, 0x64726f70ULL}));
  const double r_out = isd / std::sqrt(3.0);
  std::uniform_real_distribution<double> ux(-r_out, r_out), uy(-isd / 2.0, isd / 2.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> udepth(0.0, cfg_.channel.indoor_depth_max);
  const int per_site = cfg_.ues_per_cell * kSectors;
  for (std::size_t s = 0; s < sites_.size(); ++s) {
    for (int i = 0; i < per_site;) {
      const Vec2 p{ux(rng), uy(rng)};
      bool inside = std::hypot(p.x, p.y) >= cfg_.min_distance_m;
      for (int k = 0; k < 3 && inside; ++k) {
        const Vec2 n = rotate({1.0, 0.0}, 60.0 * k);
        inside = std::abs(p.x * n.x + p.y * n.y) <= isd / 2.0;
      }
      if (!inside) continue;
      UE ue;
      ue.position = sites_[s] + p;
      ue.indoor = u01(rng) < cfg_.indoor_fraction;
      if (ue.indoor) {
        const double depth = std::min(udepth(rng), udepth(rng));
        ue.indoor_loss_db =
            cfg_.channel.indoor_wall_loss_db + cfg_.channel.indoor_loss_per_m * depth;
      }
      ues_.push_back(ue);
      ++i;
    }
  }

  // Link table. LOS state and shadowing belong to the UE-site link and are
  // shared by the three sectors of a site.
  const std::size_t nc = cells_.size();
  loss_db_.assign(ues_.size() * nc, 0.0);
  shadow_db_.assign(ues_.size() * nc, 0.0);
  los_.assign(ues_.size() * nc, 0);
  const auto& ch = cfg_.channel;
  for (std::size_t u = 0; u < ues_.size(); ++u) {
    for (std::size_t s = 0; s < sites_.size(); ++s) {
      std::mt19937_64 link(derive_seed({cfg_.seed, 0x6c6e6bULL, u, s}));
      const std::size_t c0 = s * kSectors;
      const double d = distance_2d(c0, u);
      const bool los = u01(link) < umi_los_probability(d);
      std::normal_distribution<double> shadow(
          0.0, los ? ch.shadow_los_db : ch.shadow_nlos_db);
      const double sh = shadow(link);
      const double pl = umi_pathloss_db(d, cfg_.carrier_hz, ch.h_bs, ch.h_ut, los);
      for (int k = 0; k < kSectors; ++k) {
        const std::size_t c = c0 + static_cast<std::size_t>(k);
        const std::size_t idx = u * nc + c;
        los_[idx] = los ? 1 : 0;
        shadow_db_[idx] = sh;
        loss_db_[idx] = pl + sh + ues_[u].indoor_loss_db -
                        sector_gain_dbi(ch, boresight_offset_deg(c, u));
      }
    }
  }
  assign_serving();
}

NetworkScenario NetworkScenario::from_parts(ScenarioConfig cfg, std::vector<Cell> cells,
                                            std::vector<UE> ues,
                                            std::vector<double> loss_db) {
  if (cells.empty()) throw InvalidInput("scenario needs at least one cell");
  if (loss_db.size() != cells.size() * ues.size())
    throw InvalidInput("loss table must be ue x cell");
  for (double v : loss_db)
    if (!std::isfinite(v)) throw InvalidInput("loss table entries must be finite");
  NetworkScenario s;
  s.cfg_ = std::move(cfg);
  s.cells_ = std::move(cells);
  s.ues_ = std::move(ues);
  s.loss_db_ = std::move(loss_db);
  s.shadow_db_.assign(s.loss_db_.size(), 0.0);
  s.los_.assign(s.loss_db_.size(), 1);
  s.assign_serving();
  return s;
}

void NetworkScenario::assign_serving() {
  const std::size_t nc = cells_.size();
  served_.assign(nc, {});
  gain_lin_.resize(loss_db_.size());
  for (std::size_t i = 0; i < loss_db_.size(); ++i) gain_lin_[i] = db_to_lin(-loss_db_[i]);
  interference_gain_ = gain_lin_;
  for (std::size_t u = 0; u < ues_.size(); ++u) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < nc; ++c)
      if (loss_db_[u * nc + c] < loss_db_[u * nc + best]) best = c;
    ues_[u].serving_cell = static_cast<int>(best);
    served_[best].push_back(u);
    interference_gain_[u * nc + best] = 0.0;
  }
}

double NetworkScenario::distance_2d(std::size_t cell, std::size_t ue) const {
  const Vec2 base = ues_[ue].position - cells_[cell].position;
  double best = std::hypot(base.x, base.y);
  for (const Vec2& s : image_shifts_) {
    const Vec2 d = base - s;
    best = std::min(best, std::hypot(d.x, d.y));
  }
  return best;
}

double NetworkScenario::boresight_offset_deg(std::size_t cell, std::size_t ue) const {
  Vec2 best = ues_[ue].position - cells_[cell].position;
  double best_d = std::hypot(best.x, best.y);
  for (const Vec2& s : image_shifts_) {
    const Vec2 d = ues_[ue].position - cells_[cell].position - s;
    const double dd = std::hypot(d.x, d.y);
    if (dd < best_d) {
      best_d = dd;
      best = d;
    }
  }
  const double bearing = std::atan2(best.y, best.x) * 180.0 / std::numbers::pi;
  return wrap_deg(bearing - cells_[cell].azimuth_deg);
}

double NetworkScenario::noise_per_prb_dbm() const {
  return cfg_.noise_density_dbm_hz + 10.0 * std::log10(cfg_.prb_bandwidth_hz) +
         cfg_.noise_figure_db;
}

double pusch_power_dbm(const OLPCConfig& config, int m_rb, double pl_db, double cl_db,
                       double p_cmax_dbm) {
  if (m_rb < 1) throw InvalidInput("M_RB must be >= 1");
  return std::min(p_cmax_dbm, config.p0 + 10.0 * std::log10(static_cast<double>(m_rb)) +
                                  config.alpha * pl_db + cl_db);
}

int allocated_prbs(const OLPCConfig& config, int max_prb, double pl_db,
                   double p_cmax_dbm) {
  int m = std::max(max_prb, 1);
  while (m > 1 && config.p0 + 10.0 * std::log10(static_cast<double>(m)) +
                          config.alpha * pl_db >
                      p_cmax_dbm)
    m /= 2;
  return m;
}

SnapshotResult run_snapshot(const NetworkScenario& scenario, const OLPCConfig& config,
                            int k, std::uint64_t seed) {
  if (k < 1) throw InvalidInput("K must be >= 1");
  const auto& cfg = scenario.config();
  const std::size_t nc = scenario.n_cells();
  const int n_prb = cfg.n_prb;
  const int quota = std::max(n_prb / k, 1);
  std::mt19937_64 rng(seed);

  SnapshotResult out;
  std::vector<double> prb_power;  // linear mW per PRB, per record
  // occupant[p * nc + c] = record transmitting on PRB p in cell c
  std::vector<int> occupant(static_cast<std::size_t>(n_prb) * nc, -1);

  for (std::size_t c = 0; c < nc; ++c) {
    const auto& pool = scenario.served_by(c);
    if (pool.empty()) continue;
    std::vector<std::size_t> chosen;
    const auto ku = static_cast<std::size_t>(k);
    if (ku > pool.size()) {
      out.sampled_with_replacement = true;
      std::uniform_int_distribution<std::size_t> u(0, pool.size() - 1);
      for (std::size_t i = 0; i < ku; ++i) chosen.push_back(pool[u(rng)]);
    } else {
      std::vector<std::size_t> tmp = pool;
      for (std::size_t i = 0; i < ku; ++i) {
        std::uniform_int_distribution<std::size_t> u(i, tmp.size() - 1);
        std::swap(tmp[i], tmp[u(rng)]);
        chosen.push_back(tmp[i]);
      }
    }

    const std::size_t first = out.records.size();
    std::vector<int> m_rb;
    for (std::size_t ue : chosen) {
      const double pl = scenario.pathloss_db(c, ue);
      const int m = allocated_prbs(config, quota, pl, cfg.p_cmax_dbm);
      UERecord rec;
      rec.cell = c;
      rec.ue = ue;
      rec.tx_power_dbm = pusch_power_dbm(config, m, pl, 0.0, cfg.p_cmax_dbm);
      out.records.push_back(std::move(rec));
      prb_power.push_back(db_to_lin(out.records.back().tx_power_dbm -
                                    10.0 * std::log10(static_cast<double>(m))));
      m_rb.push_back(m);
    }
    // Round-robin PRB indices over the UEs that still have quota left.
    int p = 0;
    for (bool any = true; any && p < n_prb;) {
      any = false;
      for (std::size_t i = 0; i < chosen.size() && p < n_prb; ++i) {
        UERecord& rec = out.records[first + i];
        if (rec.n_prb() >= m_rb[i]) continue;
        rec.prbs.push_back(p);
        occupant[static_cast<std::size_t>(p) * nc + c] = static_cast<int>(first + i);
        ++p;
        any = true;
      }
    }
  }

  const double noise = db_to_lin(scenario.noise_per_prb_dbm());
  std::vector<double> sinr_sum(out.records.size(), 0.0);
  std::vector<double> interference(nc);
  for (int p = 0; p < n_prb; ++p) {
    const int* occ = occupant.data() + static_cast<std::size_t>(p) * nc;
    std::fill(interference.begin(), interference.end(), 0.0);
    bool used = false;
    for (std::size_t c = 0; c < nc; ++c) {
      if (occ[c] < 0) continue;
      used = true;
      const auto r = static_cast<std::size_t>(occ[c]);
      simd::axpy(prb_power[r], scenario.interference_row(out.records[r].ue),
                 interference);
    }
    if (!used) continue;
    for (std::size_t c = 0; c < nc; ++c) {
      if (occ[c] < 0) continue;
      const auto r = static_cast<std::size_t>(occ[c]);
      const double signal = prb_power[r] * scenario.gain_row(out.records[r].ue)[c];
      sinr_sum[r] += signal / (interference[c] + noise);
    }
  }
  for (std::size_t r = 0; r < out.records.size(); ++r) {
    UERecord& rec = out.records[r];
    const double n = static_cast<double>(rec.n_prb());
    rec.sinr = sinr_sum[r] / n;
    rec.bitrate = n * cfg.prb_bandwidth_hz * std::log2(1.0 + rec.sinr);
  }
  return out;
}

double alpha_fairness(double value, double r) {
  if (!(value > 0.0)) throw InvalidInput("alpha-fairness needs a positive value");
  if (!std::isfinite(r) || r < 0.0) throw InvalidInput("fairness r must be >= 0");
  if (r == 1.0) return 10.0 * std::log10(value);
  return std::pow(value, 1.0 - r) / (1.0 - r);
}

void UtilitySpec::validate() const {
  if (!std::isfinite(r) || r < 0.0) throw InvalidInput("fairness r must be >= 0");
  if (snapshots < 1) throw InvalidInput("snapshots must be >= 1");
  if (ues_per_cell < 2 || ues_per_cell > 16)
    throw InvalidInput("ues_per_cell must be in [2, 16]");
}

std::vector<double> period_bitrates(const NetworkScenario& scenario,
                                    const OLPCConfig& config, int snapshots, int k,
                                    std::uint64_t period_seed) {
  std::vector<double> rates;
  for (int s = 0; s < snapshots; ++s) {
    const auto snap =
        run_snapshot(scenario, config, k,
                     derive_seed({scenario.config().seed, period_seed,
                                  static_cast<std::uint64_t>(s)}));
    for (const auto& rec : snap.records) rates.push_back(rec.bitrate);
  }
  return rates;
}

double mean_utility(const std::vector<double>& bitrates, double r) {
  if (bitrates.empty()) throw InvalidInput("no bitrate samples");
  double acc = 0.0;
  for (double b : bitrates) acc += alpha_fairness(std::max(b, 1.0), r);
  return acc / static_cast<double>(bitrates.size());
}

double utility_observation(const NetworkScenario& scenario, const OLPCConfig& config,
                           const UtilitySpec& spec, std::uint64_t period_seed) {
  spec.validate();
  return mean_utility(
      period_bitrates(scenario, config, spec.snapshots, spec.ues_per_cell, period_seed),
      spec.r);
}

std::size_t SurfaceTable::argmax() const {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) -
                                  values.begin());
}

std::size_t SurfaceTable::argmin() const {
  return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) -
                                  values.begin());
}

std::vector<SurfaceTable> exhaustive_surfaces(const NetworkScenario& scenario,
                                              const UtilitySpec& spec,
                                              const std::vector<double>& rs,
                                              std::uint64_t seed) {
  spec.validate();
  const auto grid = config_grid();
  std::vector<SurfaceTable> out(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    out[i].r = rs[i];
    out[i].configs = grid;
    out[i].values.reserve(grid.size());
  }
  for (const auto& c : grid) {
    const auto rates =
        period_bitrates(scenario, c, spec.snapshots, spec.ues_per_cell, seed);
    for (std::size_t i = 0; i < rs.size(); ++i)
      out[i].values.push_back(mean_utility(rates, rs[i]));
  }
  return out;
}

SurfaceTable exhaustive_surface(const NetworkScenario& scenario, const UtilitySpec& spec,
                                std::uint64_t seed) {
  return exhaustive_surfaces(scenario, spec, {spec.r}, seed).front();
}

}  // namespace bogp::olpc
