// SPDX-License-Identifier: Apache-2.0
#include "hbfsim/phy_abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hbfsim {

namespace {
double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
}  // namespace

double LinkBudget::p_sc_dl_w() const {
  return dbm_to_w(p_tx_bs_dbm) / (static_cast<double>(n_subcarriers) * n_active_layers);
}

double LinkBudget::p_sc_ul_w() const {
  return dbm_to_w(p_tx_ue_dbm) / static_cast<double>(n_subcarriers);
}

double LinkBudget::noise_w() const {
  return dbm_to_w(noise_psd_dbm_hz + noise_figure_db) * delta_f_hz;
}

std::vector<McsEntry> default_mcs_table(double gap_db) {
  constexpr int kEntries = 15;
  constexpr double kSeLow = 0.2;
  constexpr double kSeHigh = 5.55;
  std::vector<McsEntry> table;
  table.reserve(kEntries);
  for (int i = 0; i < kEntries; ++i) {
    McsEntry e;
    e.index = i;
    e.spectral_eff = kSeLow + i * (kSeHigh - kSeLow) / (kEntries - 1);
    e.sinr_threshold_db = 10.0 * std::log10(std::pow(2.0, e.spectral_eff) - 1.0) + gap_db;
    table.push_back(e);
  }
  return table;
}

McsSelection select_mcs(double reported_sinr_eff_db, const std::vector<McsEntry>& table) {
  if (table.empty()) throw std::invalid_argument("select_mcs: empty MCS table");
  McsSelection sel{table.front(), true};
  for (const McsEntry& e : table) {
    if (e.sinr_threshold_db <= reported_sinr_eff_db) {
      sel.entry = e;
      sel.floored = false;
    }
  }
  return sel;
}

namespace {

// -beta ln( sum_i w_i e^{-s_i/beta} / sum_i w_i ), evaluated around the
// smallest exponent so high-SNR samples cannot underflow the mean to zero.
double eesm_log_sum(const double* sinrs, const double* weights, std::size_t n, double beta) {
  double x_min = sinrs[0] / beta;
  for (std::size_t i = 1; i < n; ++i) x_min = std::min(x_min, sinrs[i] / beta);
  double acc = 0.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights ? weights[i] : 1.0;
    acc += w * std::exp(x_min - sinrs[i] / beta);
    wsum += w;
  }
  if (!(wsum > 0.0)) throw std::invalid_argument("effective_sinr: zero total weight");
  return beta * (x_min - std::log(acc / wsum));
}

}  // namespace

double effective_sinr(const std::vector<double>& linear_sinrs, double beta) {
  if (linear_sinrs.empty()) throw std::invalid_argument("effective_sinr: empty SINR list");
  if (!(beta > 0.0)) throw std::invalid_argument("effective_sinr: beta must be > 0");
  return eesm_log_sum(linear_sinrs.data(), nullptr, linear_sinrs.size(), beta);
}

double effective_sinr_weighted(const arma::vec& linear_sinrs, const arma::vec& weights,
                               double beta) {
  if (linear_sinrs.empty() || linear_sinrs.n_elem != weights.n_elem) {
    throw std::invalid_argument("effective_sinr_weighted: bad sample/weight vectors");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("effective_sinr_weighted: beta must be > 0");
  return eesm_log_sum(linear_sinrs.memptr(), weights.memptr(), linear_sinrs.n_elem, beta);
}

std::int64_t tb_size_bits(const McsEntry& mcs, int n_symbols, int n_subcarriers) {
  if (n_symbols < 0 || n_subcarriers <= 0) {
    throw std::invalid_argument("tb_size_bits: arguments must be positive");
  }
  // The epsilon guards decimal spectral efficiencies (e.g. 3.64 * 3300) from
  // flooring one bit short of the exact product.
  const auto bits_per_symbol =
      static_cast<std::int64_t>(std::floor(mcs.spectral_eff * n_subcarriers + 1e-9));
  return bits_per_symbol * n_symbols;
}

TransportBlockResult tb_verdict(double actual_sinr_eff_db, const McsEntry& mcs, double slope_db,
                                double margin_db, Rng& rng) {
  if (!(slope_db > 0.0)) throw std::invalid_argument("tb_verdict: slope must be > 0");
  TransportBlockResult r;
  r.sinr_eff_db = actual_sinr_eff_db;
  r.mcs = mcs;
  const double x = (actual_sinr_eff_db - mcs.sinr_threshold_db + margin_db) / slope_db;
  // 1/(1+exp(x)) computed stably for large |x|.
  r.bler = x >= 0.0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
  r.corrupted = rng.uniform() < r.bler;
  return r;
}

double sinr_ratio(double desired_w, const std::vector<double>& interference_w, double noise_w) {
  double denom = noise_w;
  for (double i : interference_w) denom += i;
  return desired_w / denom;
}

namespace {

// Shared Eq.1 / Eq.2 assembly. `victim_channel_only` selects the DL flavor
// (all terms through the victim's channel); UL routes each interferer via its
// own channel and pathloss into the victim layer's combiner.
double sinr_common(Direction dir, int ue, int subband, const PrecoderSet& ps,
                   const std::map<int, const ChannelRealization*>& channels,
                   const LinkBudget& budget, const std::set<int>& active_layers) {
  const int layer = ps.layer_of(ue);
  if (layer < 0 || active_layers.find(layer) == active_layers.end()) {
    throw std::invalid_argument("sinr: UE's layer is not in the active set");
  }
  const ChannelRealization& cr = *channels.at(ue);
  const double l_u = cr.linear_gain();
  const double p_sc_dl = budget.p_sc_dl_w();
  const double p_sc_ul = budget.p_sc_ul_w();

  double desired = 0.0;
  std::vector<double> interf;
  interf.reserve(active_layers.size());
  if (dir == Direction::downlink) {
    const arma::cx_mat& h = cr.subbands.at(subband);
    for (int lp : active_layers) {
      const std::complex<double> heq =
          effective_channel(ps.ue_beams[layer], h, ps.bs_vector(subband, lp));
      const double rx = l_u * std::norm(heq) * p_sc_dl;
      if (lp == layer) {
        desired = rx;
      } else {
        interf.push_back(rx);
      }
    }
  } else {
    const BeamVector combiner = ps.bs_vector(subband, layer);
    for (int lp : active_layers) {
      const int src_ue = ps.ues[lp];
      const ChannelRealization& src = *channels.at(src_ue);
      const std::complex<double> heq =
          effective_channel(ps.ue_beams[lp], src.subbands.at(subband), combiner);
      const double rx = src.linear_gain() * std::norm(heq) * p_sc_ul;
      if (lp == layer) {
        desired = rx;
      } else {
        interf.push_back(rx);
      }
    }
  }
  return sinr_ratio(desired, interf, budget.noise_w());
}

}  // namespace

double sinr_dl(int ue, int subband, const PrecoderSet& dl,
               const std::map<int, const ChannelRealization*>& channels, const LinkBudget& budget,
               const std::set<int>& active_layers) {
  return sinr_common(Direction::downlink, ue, subband, dl, channels, budget, active_layers);
}

double sinr_ul(int ue, int subband, const PrecoderSet& ul,
               const std::map<int, const ChannelRealization*>& channels, const LinkBudget& budget,
               const std::set<int>& active_layers) {
  return sinr_common(Direction::uplink, ue, subband, ul, channels, budget, active_layers);
}

}  // namespace hbfsim
