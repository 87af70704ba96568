// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "hbfsim/beamforming.hpp"
#include "hbfsim/channel.hpp"
#include "hbfsim/rng.hpp"

namespace hbfsim {

/// Transmit powers, noise, and the per-layer per-subcarrier power split.
struct LinkBudget {
  double p_tx_bs_dbm = 30.0;
  double p_tx_ue_dbm = 30.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 5.0;
  double delta_f_hz = 60e3;
  int n_subcarriers = 3300;
  int n_active_layers = 1;  // layers sharing the BS power at bundle start

  // BS power split across subcarriers and active layers.
  double p_sc_dl_w() const;
  // Each UE carries a single layer, so its power splits over subcarriers only.
  double p_sc_ul_w() const;
  // Delta_f * N_o with the receiver noise figure folded in.
  double noise_w() const;
};

struct McsEntry {
  int index = 0;
  double spectral_eff = 0.0;     // bits per subcarrier per symbol
  double sinr_threshold_db = 0.0;
};

/// 15 entries, spectral efficiency 0.2 .. 5.55 bits/subcarrier, thresholds at
/// the Shannon inverse plus an implementation gap in dB.
std::vector<McsEntry> default_mcs_table(double gap_db = 3.0);

struct McsSelection {
  McsEntry entry;
  bool floored = false;  // reported SINR was below every threshold
};

/// Highest-index entry whose threshold does not exceed the reported value
/// (boundary inclusive); falls back to the lowest entry, flagged.
McsSelection select_mcs(double reported_sinr_eff_db, const std::vector<McsEntry>& table);

/// Exponential effective-SINR mapping over linear per-subband SINRs:
/// -beta ln( mean_k exp(-sinr_k / beta) ).
double effective_sinr(const std::vector<double>& linear_sinrs, double beta);
/// Same mapping with per-sample weights (e.g. symbols spent at each SINR).
double effective_sinr_weighted(const arma::vec& linear_sinrs, const arma::vec& weights,
                               double beta);

std::int64_t tb_size_bits(const McsEntry& mcs, int n_symbols, int n_subcarriers);

struct TransportBlockResult {
  int ue_id = -1;
  Direction direction = Direction::downlink;
  double sinr_eff_db = 0.0;
  McsEntry mcs;
  std::int64_t tb_bits = 0;
  double bler = 0.0;
  bool corrupted = false;
};

/// Logistic SINR-to-BLER verdict centered margin_db below the MCS threshold:
/// bler = 1 / (1 + exp((sinr - threshold + margin) / slope)).
TransportBlockResult tb_verdict(double actual_sinr_eff_db, const McsEntry& mcs, double slope_db,
                                double margin_db, Rng& rng);

/// Shared SINR ratio: desired / (sum interference + noise), all in watts.
double sinr_ratio(double desired_w, const std::vector<double>& interference_w, double noise_w);

/// Downlink SINR of `ue` at one subband. Desired and interfering beams both
/// arrive through the victim's own channel and pathloss; interference sums
/// over the other active layers of the group.
double sinr_dl(int ue, int subband, const PrecoderSet& dl,
               const std::map<int, const ChannelRealization*>& channels, const LinkBudget& budget,
               const std::set<int>& active_layers);

/// Uplink SINR of `ue` at one subband: each interfering UE is received through
/// its own channel and pathloss, projected onto the victim layer's combiner.
double sinr_ul(int ue, int subband, const PrecoderSet& ul,
               const std::map<int, const ChannelRealization*>& channels, const LinkBudget& budget,
               const std::set<int>& active_layers);

}  // namespace hbfsim
