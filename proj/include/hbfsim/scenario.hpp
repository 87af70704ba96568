// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbfsim/channel.hpp"
#include "hbfsim/mac_scheduler.hpp"
#include "hbfsim/phy_abstraction.hpp"

namespace hbfsim {

struct ArrayConfig {
  int n1 = 1;
  int n2 = 1;
  double phase_const = kPi;
};

struct TrafficConfig {
  int packet_bytes = 1500;
  std::uint64_t interval_us = 1500;
  bool symmetric = true;
};

struct ChannelModelConfig {
  int n_clusters = 12;
  double k_factor_db = 10.0;
  double delay_spread_ns = 50.0;
  double t_coh_ms = 50.0;
  bool shadowing = true;
  double angle_spread_deg = 10.0;
};

/// Full scenario description; the JSON config file mirrors these field names.
struct ScenarioConfig {
  int n_ues = 7;
  double disc_radius_m = 100.0;
  double fc_ghz = 28.0;

  int n_rbs = 275;
  int subcarriers_per_rb = 12;
  double delta_f_hz = 60e3;

  int symbols_per_slot = 14;
  int slots_per_subframe = 4;
  double symbol_duration_us = 17.85;

  ArrayConfig bs_array{8, 8, kPi};
  ArrayConfig ue_array{4, 4, kPi};
  int n_layers = 1;
  std::string bf_scheme = "cbf";        // "cbf" | "smbf"
  std::string scheduler = "tmrs";       // "tmrs" | "pmrs"

  double p_tx_bs_dbm = 30.0;
  double p_tx_ue_dbm = 30.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 5.0;

  double bs_height_m = 25.0;
  double ue_height_m = 1.6;

  TrafficConfig traffic;
  int duration_ms = 200;
  int n_drops = 5;
  std::uint64_t base_seed = 1;
  ChannelModelConfig channel;
  int cqi_delay_subframes = 2;
  int subband_size = 12;  // subcarriers per channel/precoder subband

  // Link abstraction knobs.
  double eesm_beta = 1.0;
  double bler_slope_db = 0.5;
  double bler_margin_db = 3.0;
  double mcs_gap_db = 3.0;

  int n_subcarriers() const { return n_rbs * subcarriers_per_rb; }
  int n_subbands() const { return (n_subcarriers() + subband_size - 1) / subband_size; }
  double bandwidth_hz() const { return n_subcarriers() * delta_f_hz; }
  int k_ref() const { return n_subbands() / 2; }

  FrameConfig frame() const;
  SubbandGrid subband_grid() const;
  ClusterParams cluster_params() const;
  LinkBudget link_budget(int n_active_layers) const;
};

/// Field-level validation messages; empty means the config is runnable.
std::vector<std::string> validate(const ScenarioConfig& cfg);

ScenarioConfig config_from_json_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json_text(const ScenarioConfig& cfg);

/// Named experiment presets: "paper-low-traffic" (1500 B / 1500 us, 20 drops)
/// and "paper-high-traffic" (1500 B / 150 us, 20 drops).
void apply_preset(ScenarioConfig& cfg, const std::string& name);

}  // namespace hbfsim
