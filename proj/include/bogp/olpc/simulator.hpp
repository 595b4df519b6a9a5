#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bogp/gp/types.hpp"

namespace bogp::olpc {

struct OLPCConfig {
  double alpha = 1.0;
  double p0 = -80.0;  // dBm
  friend bool operator==(const OLPCConfig&, const OLPCConfig&) = default;
};

// 3GPP value sets: 8 alphas, P0 from -202 to 24 dBm in 2 dB steps.
const std::vector<double>& alpha_values();
const std::vector<double>& p0_values();
// All 912 configurations, alpha-major: index = ia * 114 + ip.
std::vector<OLPCConfig> config_grid();
std::size_t grid_index(const OLPCConfig& c);  // throws if off-grid
bool on_grid(const OLPCConfig& c);

ConfigPoint to_point(const OLPCConfig& c);
OLPCConfig from_point(const ConfigPoint& p);

// Channel model constants. Defaults follow the UMi street canyon tables.
struct ChannelModel {
  double h_bs = 10.0;
  double h_ut = 1.5;
  double shadow_los_db = 4.0;
  double shadow_nlos_db = 7.82;
  // Outdoor-to-indoor: wall loss + 0.5 dB/m over an inside distance drawn as
  // the min of two U(0, indoor_depth_max) samples.
  double indoor_wall_loss_db = 12.7;
  double indoor_loss_per_m = 0.5;
  double indoor_depth_max = 25.0;
  double antenna_max_gain_dbi = 8.0;
  double antenna_beamwidth_deg = 65.0;
  double antenna_front_back_db = 30.0;
};

struct ScenarioConfig {
  int n_sites = 7;  // 1, 3 or 7
  double isd_m = 200.0;
  double carrier_hz = 3.5e9;
  int n_prb = 100;
  double prb_bandwidth_hz = 180e3;
  double p_cmax_dbm = 23.0;
  double noise_figure_db = 5.0;
  double noise_density_dbm_hz = -174.0;
  int ues_per_cell = 100;
  double indoor_fraction = 0.8;
  double min_distance_m = 10.0;
  bool wraparound = true;
  ChannelModel channel;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Vec2 {
  double x = 0.0, y = 0.0;
};

struct Cell {
  int site = 0;
  Vec2 position;
  double azimuth_deg = 0.0;
};

struct UE {
  Vec2 position;
  bool indoor = false;
  double indoor_loss_db = 0.0;
  int serving_cell = -1;
};

// Basic UMi pathloss in dB; LOS or NLOS branch. The 3-D distance is formed
// from d2d and the antenna heights, clamped to at least 1 m.
double umi_pathloss_db(double d2d_m, double carrier_hz, double h_bs, double h_ut,
                       bool los);
double umi_los_probability(double d2d_m);
// Horizontal sector pattern gain in dBi (max gain included).
double sector_gain_dbi(const ChannelModel& ch, double angle_off_boresight_deg);

// Frozen network drop: sites, cells, UEs, and the per-link loss table.
class NetworkScenario {
 public:
  explicit NetworkScenario(ScenarioConfig cfg);

  const ScenarioConfig& config() const { return cfg_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<UE>& ues() const { return ues_; }
  std::size_t n_cells() const { return cells_.size(); }
  // UE indices served by a cell, ascending.
  const std::vector<std::size_t>& served_by(std::size_t cell) const {
    return served_[cell];
  }

  // Total loss in dB from UE to cell: pathloss + shadowing + indoor loss -
  // antenna gain. Frozen at construction.
  double pathloss_db(std::size_t cell, std::size_t ue) const {
    return loss_db_[ue * cells_.size() + cell];
  }
  bool is_los(std::size_t cell, std::size_t ue) const {
    return los_[ue * cells_.size() + cell] != 0;
  }
  double shadowing_db(std::size_t cell, std::size_t ue) const {
    return shadow_db_[ue * cells_.size() + cell];
  }
  // Distance and boresight offset with wraparound applied.
  double distance_2d(std::size_t cell, std::size_t ue) const;
  double boresight_offset_deg(std::size_t cell, std::size_t ue) const;

  double noise_per_prb_dbm() const;

  std::span<const double> gain_row(std::size_t ue) const {
    return {gain_lin_.data() + ue * cells_.size(), cells_.size()};
  }
  std::span<const double> interference_row(std::size_t ue) const {
    return {interference_gain_.data() + ue * cells_.size(), cells_.size()};
  }

  // Test scenario assembled from explicit parts; the loss table is given
  // directly (row-major ue x cell) and serving cells are chosen from it.
  static NetworkScenario from_parts(ScenarioConfig cfg, std::vector<Cell> cells,
                                    std::vector<UE> ues,
                                    std::vector<double> loss_db);

 private:
  NetworkScenario() = default;
  void assign_serving();

  ScenarioConfig cfg_;
  std::vector<Vec2> sites_;
  std::vector<Vec2> image_shifts_;
  std::vector<Cell> cells_;
  std::vector<UE> ues_;
  std::vector<double> loss_db_;
  std::vector<double> shadow_db_;
  std::vector<unsigned char> los_;
  std::vector<double> gain_lin_;          // 10^(-loss/10), ue x cell
  std::vector<double> interference_gain_;  // gain_lin_ with the serving entry 0
  std::vector<std::vector<std::size_t>> served_;
};

// Power control formula with CL = 0.
double pusch_power_dbm(const OLPCConfig& config, int m_rb, double pl_db,
                       double cl_db, double p_cmax_dbm);

// Largest M_RB reached by halving floor(n_prb/K) until the uncapped power fits
// under P_CMAX, minimum 1.
int allocated_prbs(const OLPCConfig& config, int max_prb, double pl_db,
                   double p_cmax_dbm);

struct UERecord {
  std::size_t cell = 0;
  std::size_t ue = 0;
  double tx_power_dbm = 0.0;
  std::vector<int> prbs;
  double sinr = 0.0;     // linear, mean over the UE's PRBs
  double bitrate = 0.0;  // bit/s
  int n_prb() const { return static_cast<int>(prbs.size()); }
};

struct SnapshotResult {
  std::vector<UERecord> records;  // cell-major, sampling order within a cell
  bool sampled_with_replacement = false;
};

SnapshotResult run_snapshot(const NetworkScenario& scenario,
                            const OLPCConfig& config, int k, std::uint64_t seed);

double alpha_fairness(double value, double r);

struct UtilitySpec {
  double r = 1.0;
  int snapshots = 16;
  int ues_per_cell = 4;
  void validate() const;
};

// Bitrates of all S snapshots of one sampling period, in snapshot order.
std::vector<double> period_bitrates(const NetworkScenario& scenario,
                                    const OLPCConfig& config, int snapshots,
                                    int k, std::uint64_t period_seed);

// Mean alpha-fairness of bitrate samples, each floored at 1 bit/s.
double mean_utility(const std::vector<double>& bitrates, double r);

double utility_observation(const NetworkScenario& scenario,
                           const OLPCConfig& config, const UtilitySpec& spec,
                           std::uint64_t period_seed);

struct SurfaceTable {
  double r = 0.0;
  std::vector<OLPCConfig> configs;  // grid order
  std::vector<double> values;
  std::size_t argmax() const;
  std::size_t argmin() const;
};

// All grid configurations with common seeds; one table per fairness level,
// all computed from the same bitrate samples.
std::vector<SurfaceTable> exhaustive_surfaces(const NetworkScenario& scenario,
                                              const UtilitySpec& spec,
                                              const std::vector<double>& rs,
                                              std::uint64_t seed);
SurfaceTable exhaustive_surface(const NetworkScenario& scenario,
                                const UtilitySpec& spec, std::uint64_t seed);

}  // namespace bogp::olpc
