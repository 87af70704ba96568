// SPDX-License-Identifier: Apache-2.0
#include "hbfsim/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hbfsim {

using nlohmann::json;

FrameConfig ScenarioConfig::frame() const {
  FrameConfig f;
  f.symbols_per_slot = symbols_per_slot;
  f.slots_per_subframe = slots_per_subframe;
  f.symbol_duration_us = symbol_duration_us;
  f.n_layers = n_layers;
  return f;
}

SubbandGrid ScenarioConfig::subband_grid() const {
  return SubbandGrid{n_subbands(), subband_size * delta_f_hz};
}

ClusterParams ScenarioConfig::cluster_params() const {
  ClusterParams prm;
  prm.n_clusters = channel.n_clusters;
  prm.angle_spread_rad = channel.angle_spread_deg * kPi / 180.0;
  prm.k_factor_db = channel.k_factor_db;
  prm.delay_spread_s = channel.delay_spread_ns * 1e-9;
  return prm;
}

LinkBudget ScenarioConfig::link_budget(int n_active_layers) const {
  LinkBudget b;
  b.p_tx_bs_dbm = p_tx_bs_dbm;
  b.p_tx_ue_dbm = p_tx_ue_dbm;
  b.noise_psd_dbm_hz = noise_psd_dbm_hz;
  b.noise_figure_db = noise_figure_db;
  b.delta_f_hz = delta_f_hz;
  b.n_subcarriers = n_subcarriers();
  b.n_active_layers = std::max(1, n_active_layers);
  return b;
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> errs;
  const auto require = [&](bool ok, const std::string& field, const std::string& msg) {
    if (!ok) errs.push_back(field + ": " + msg);
  };
  require(cfg.n_ues >= 1, "n_ues", "must be >= 1");
  require(cfg.disc_radius_m >= 0, "disc_radius_m", "must be >= 0");
  require(cfg.fc_ghz >= 0.5 && cfg.fc_ghz <= 100.0, "fc_ghz", "must lie in [0.5, 100]");
  require(cfg.n_rbs >= 1, "n_rbs", "must be >= 1");
  require(cfg.subcarriers_per_rb >= 1, "subcarriers_per_rb", "must be >= 1");
  require(cfg.delta_f_hz > 0, "delta_f_hz", "must be > 0");
  require(cfg.symbols_per_slot >= 3, "symbols_per_slot", "must be >= 3");
  require(cfg.slots_per_subframe >= 1, "slots_per_subframe", "must be >= 1");
  require(cfg.symbol_duration_us > 0, "symbol_duration_us", "must be > 0");
  require(cfg.bs_array.n1 >= 1 && cfg.bs_array.n2 >= 1, "bs_array", "n1 and n2 must be >= 1");
  require(cfg.ue_array.n1 >= 1 && cfg.ue_array.n2 >= 1, "ue_array", "n1 and n2 must be >= 1");
  require(cfg.bs_array.phase_const > 0, "bs_array.phase_const", "must be > 0");
  require(cfg.ue_array.phase_const > 0, "ue_array.phase_const", "must be > 0");
  require(cfg.n_layers >= 1, "n_layers", "must be >= 1");
  require(cfg.bf_scheme == "cbf" || cfg.bf_scheme == "smbf", "bf_scheme",
          "must be 'cbf' or 'smbf'");
  require(cfg.scheduler == "tmrs" || cfg.scheduler == "pmrs", "scheduler",
          "must be 'tmrs' or 'pmrs'");
  if (cfg.scheduler == "tmrs") {
    require(cfg.n_layers == 1, "scheduler", "tmrs requires n_layers == 1");
  }
  if (cfg.scheduler == "pmrs") {
    require(cfg.bf_scheme == "cbf" || cfg.bf_scheme == "smbf", "scheduler",
            "pmrs requires a beam-aware bf_scheme");
  }
  require(cfg.n_layers <= cfg.bs_array.n1 * cfg.bs_array.n2, "n_layers",
          "cannot exceed the BS element count");
  // packet_bytes == 0 expresses a zero-traffic scenario.
  require(cfg.traffic.packet_bytes >= 0, "traffic.packet_bytes", "must be >= 0");
  require(cfg.traffic.interval_us > 0, "traffic.interval_us", "must be > 0");
  require(cfg.duration_ms >= 1, "duration_ms", "must be >= 1");
  require(cfg.n_drops >= 1, "n_drops", "must be >= 1");
  require(cfg.channel.n_clusters >= 1, "channel.n_clusters", "must be >= 1");
  require(cfg.channel.t_coh_ms > 0, "channel.t_coh_ms", "must be > 0");
  require(cfg.channel.delay_spread_ns >= 0, "channel.delay_spread_ns", "must be >= 0");
  require(cfg.channel.angle_spread_deg >= 0, "channel.angle_spread_deg", "must be >= 0");
  require(cfg.cqi_delay_subframes >= 0, "cqi_delay_subframes", "must be >= 0");
  require(cfg.subband_size >= 1, "subband_size", "must be >= 1");
  require(cfg.eesm_beta > 0, "eesm_beta", "must be > 0");
  require(cfg.bler_slope_db > 0, "bler_slope_db", "must be > 0");
  require(cfg.ue_height_m >= 0 && cfg.bs_height_m >= 0, "bs_height_m", "heights must be >= 0");
  return errs;
}

namespace {

void read_array(const json& j, ArrayConfig& a) {
  if (j.contains("n1")) a.n1 = j.at("n1").get<int>();
  if (j.contains("n2")) a.n2 = j.at("n2").get<int>();
  if (j.contains("phase_const")) a.phase_const = j.at("phase_const").get<double>();
}

template <typename T>
void opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text) {
  json j = json::parse(text);
  ScenarioConfig cfg;
  opt(j, "n_ues", cfg.n_ues);
  opt(j, "disc_radius_m", cfg.disc_radius_m);
  opt(j, "fc_ghz", cfg.fc_ghz);
  opt(j, "n_rbs", cfg.n_rbs);
  opt(j, "subcarriers_per_rb", cfg.subcarriers_per_rb);
  opt(j, "delta_f_hz", cfg.delta_f_hz);
  opt(j, "symbols_per_slot", cfg.symbols_per_slot);
  opt(j, "slots_per_subframe", cfg.slots_per_subframe);
  opt(j, "symbol_duration_us", cfg.symbol_duration_us);
  if (j.contains("bs_array")) read_array(j.at("bs_array"), cfg.bs_array);
  if (j.contains("ue_array")) read_array(j.at("ue_array"), cfg.ue_array);
  opt(j, "n_layers", cfg.n_layers);
  opt(j, "bf_scheme", cfg.bf_scheme);
  opt(j, "scheduler", cfg.scheduler);
  opt(j, "p_tx_bs_dbm", cfg.p_tx_bs_dbm);
  opt(j, "p_tx_ue_dbm", cfg.p_tx_ue_dbm);
  opt(j, "noise_psd_dbm_hz", cfg.noise_psd_dbm_hz);
  opt(j, "noise_figure_db", cfg.noise_figure_db);
  opt(j, "bs_height_m", cfg.bs_height_m);
  opt(j, "ue_height_m", cfg.ue_height_m);
  if (j.contains("traffic")) {
    const json& t = j.at("traffic");
    opt(t, "packet_bytes", cfg.traffic.packet_bytes);
    opt(t, "interval_us", cfg.traffic.interval_us);
    opt(t, "symmetric", cfg.traffic.symmetric);
  }
  opt(j, "duration_ms", cfg.duration_ms);
  opt(j, "n_drops", cfg.n_drops);
  opt(j, "base_seed", cfg.base_seed);
  if (j.contains("channel")) {
    const json& c = j.at("channel");
    opt(c, "n_clusters", cfg.channel.n_clusters);
    opt(c, "k_factor_db", cfg.channel.k_factor_db);
    opt(c, "delay_spread_ns", cfg.channel.delay_spread_ns);
    opt(c, "t_coh_ms", cfg.channel.t_coh_ms);
    opt(c, "shadowing", cfg.channel.shadowing);
    opt(c, "angle_spread_deg", cfg.channel.angle_spread_deg);
  }
  opt(j, "cqi_delay_subframes", cfg.cqi_delay_subframes);
  opt(j, "subband_size", cfg.subband_size);
  opt(j, "eesm_beta", cfg.eesm_beta);
  opt(j, "bler_slope_db", cfg.bler_slope_db);
  opt(j, "bler_margin_db", cfg.bler_margin_db);
  opt(j, "mcs_gap_db", cfg.mcs_gap_db);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const ScenarioConfig& cfg) {
  json j;
  j["n_ues"] = cfg.n_ues;
  j["disc_radius_m"] = cfg.disc_radius_m;
  j["fc_ghz"] = cfg.fc_ghz;
  j["n_rbs"] = cfg.n_rbs;
  j["subcarriers_per_rb"] = cfg.subcarriers_per_rb;
  j["delta_f_hz"] = cfg.delta_f_hz;
  j["symbols_per_slot"] = cfg.symbols_per_slot;
  j["slots_per_subframe"] = cfg.slots_per_subframe;
  j["symbol_duration_us"] = cfg.symbol_duration_us;
  j["bs_array"] = {{"n1", cfg.bs_array.n1}, {"n2", cfg.bs_array.n2},
                   {"phase_const", cfg.bs_array.phase_const}};
  j["ue_array"] = {{"n1", cfg.ue_array.n1}, {"n2", cfg.ue_array.n2},
                   {"phase_const", cfg.ue_array.phase_const}};
  j["n_layers"] = cfg.n_layers;
  j["bf_scheme"] = cfg.bf_scheme;
  j["scheduler"] = cfg.scheduler;
  j["p_tx_bs_dbm"] = cfg.p_tx_bs_dbm;
  j["p_tx_ue_dbm"] = cfg.p_tx_ue_dbm;
  j["noise_psd_dbm_hz"] = cfg.noise_psd_dbm_hz;
  j["noise_figure_db"] = cfg.noise_figure_db;
  j["bs_height_m"] = cfg.bs_height_m;
  j["ue_height_m"] = cfg.ue_height_m;
  j["traffic"] = {{"packet_bytes", cfg.traffic.packet_bytes},
                  {"interval_us", cfg.traffic.interval_us},
                  {"symmetric", cfg.traffic.symmetric}};
  j["duration_ms"] = cfg.duration_ms;
  j["n_drops"] = cfg.n_drops;
  j["base_seed"] = cfg.base_seed;
  j["channel"] = {{"n_clusters", cfg.channel.n_clusters},
                  {"k_factor_db", cfg.channel.k_factor_db},
                  {"delay_spread_ns", cfg.channel.delay_spread_ns},
                  {"t_coh_ms", cfg.channel.t_coh_ms},
                  {"shadowing", cfg.channel.shadowing},
                  {"angle_spread_deg", cfg.channel.angle_spread_deg}};
  j["cqi_delay_subframes"] = cfg.cqi_delay_subframes;
  j["subband_size"] = cfg.subband_size;
  j["eesm_beta"] = cfg.eesm_beta;
  j["bler_slope_db"] = cfg.bler_slope_db;
  j["bler_margin_db"] = cfg.bler_margin_db;
  j["mcs_gap_db"] = cfg.mcs_gap_db;
  return j.dump(2);
}

void apply_preset(ScenarioConfig& cfg, const std::string& name) {
  if (name == "paper-low-traffic") {
    cfg.traffic.packet_bytes = 1500;
    cfg.traffic.interval_us = 1500;
    cfg.traffic.symmetric = true;
    cfg.n_drops = 20;
    cfg.duration_ms = 100;
  } else if (name == "paper-high-traffic") {
    cfg.traffic.packet_bytes = 1500;
    cfg.traffic.interval_us = 150;
    cfg.traffic.symmetric = true;
    cfg.n_drops = 20;
    cfg.duration_ms = 100;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
}

}  // namespace hbfsim
