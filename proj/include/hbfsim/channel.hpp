// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <complex>
#include <vector>

#include "hbfsim/array_codebook.hpp"
#include "hbfsim/rng.hpp"

namespace hbfsim {

/// One dropped UE relative to the serving BS at the origin.
struct Placement {
  int ue_id = 0;
  arma::vec3 position{arma::fill::zeros};     // meters
  arma::vec3 bs_position{arma::fill::zeros};  // meters
  double d2d = 0.0;
  double d3d = 0.0;
  bool los = false;  // filled after the LOS draw in pathloss_uma
};

/// Uniform drop over a disc of the given radius around the BS.
std::vector<Placement> drop_ues(int n_ues, double radius_m, double h_bs_m, double h_ut_m,
                                Rng& rng);

struct PathlossResult {
  double pathloss_db = 0.0;
  bool los = false;
};

/// Urban-Macro pathloss with a random LOS state and optional lognormal
/// shadowing (4 dB LOS / 6 dB NLOS). d2d is clamped below at 10 m.
PathlossResult pathloss_uma(const Placement& p, double fc_ghz, bool shadowing, Rng& rng);

struct Cluster {
  std::complex<double> gain;
  double delay_s = 0.0;
  double aod_az = 0.0, aod_el = 0.0;  // BS-side departure, array-local radians
  double aoa_az = 0.0, aoa_el = 0.0;  // UE-side arrival, array-local radians
};

struct ClusterParams {
  int n_clusters = 12;
  double angle_spread_rad = 10.0 * kPi / 180.0;
  double k_factor_db = 10.0;     // specular boost of the first cluster when LOS
  double delay_spread_s = 50e-9; // RMS delay spread of the exponential delays
};

/// Small-scale clustered channel: one cluster on the geometric LOS bearing plus
/// n_clusters-1 angle-perturbed clusters, unit total mean power.
struct ClusterSet {
  std::vector<Cluster> clusters;
  ArrayGeometry rx_geom;  // UE side
  ArrayGeometry tx_geom;  // BS side
  bool los = false;
  double specular_amp = 0.0;  // sqrt(K/(K+1)) when LOS, else 0
  double diffuse_std = 1.0;   // per-cluster diffuse amplitude sqrt(1/((K+1)L))
};

ClusterSet generate_clusters(const Placement& p, const ArrayGeometry& rx_geom,
                             const ArrayGeometry& tx_geom, const ClusterParams& prm, Rng& rng);

/// Channel matrix at one frequency offset from the carrier:
///   H = sum_l gain_l e^{-j 2 pi delay_l f} a_rx(aoa_l) a_tx(aod_l)^T
/// with unit-modulus (un-normalized) steering vectors, so the array gain is
/// carried by H while beam vectors stay unit-norm.
arma::cx_mat channel_at(const ClusterSet& cs, double f_offset_hz);

/// Evenly spaced subbands centered on the carrier.
struct SubbandGrid {
  int n_subbands = 1;
  double spacing_hz = 0.0;

  double offset_hz(int k) const { return (k - 0.5 * (n_subbands - 1)) * spacing_hz; }
};

struct ChannelRealization {
  int ue_id = 0;
  double pathloss_db = 0.0;
  std::vector<arma::cx_mat> subbands;  // H per subband, N_rx x N_tx
  double timestamp_s = 0.0;
  SubbandGrid grid;

  double linear_gain() const { return std::pow(10.0, -pathloss_db / 10.0); }
};

ChannelRealization realize_channel(const ClusterSet& cs, int ue_id, double pathloss_db,
                                   const SubbandGrid& grid, double timestamp_s);

/// AR(1) mixing coefficient for a time step against a coherence time.
double coherence_rho(double dt_s, double t_coh_s);

/// One AR(1) step on the cluster gains: gain' = rho gain + sqrt(1-rho^2)
/// innovation, innovations drawn from the generating distribution.
void evolve_gains(ClusterSet& cs, double rho, Rng& rng);

/// evolve_gains plus regeneration of the per-subband matrices at
/// timestamp + dt.
ChannelRealization evolve(const ChannelRealization& cr, ClusterSet& cs, double dt_s, double rho,
                          Rng& rng);

// ---- beam-domain evaluation -------------------------------------------------
// The simulation loop needs w^T H[k] v for a handful of beams at every subband
// and subframe. Going through the factored cluster form costs O(L) per subband
// instead of O(N_rx N_tx), with results equal to effective_channel on the
// realized matrices up to rounding.

/// Per-cluster, per-subband delay phasors e^{-j 2 pi delay_l f_k}; delays and
/// the grid are fixed within a drop, so this table is computed once.
struct ClusterPhaseTable {
  arma::cx_mat phase;  // n_subbands x n_clusters
};

ClusterPhaseTable make_phase_table(const ClusterSet& cs, const SubbandGrid& grid);

/// Effective channels w^T H[k] v_j for one receive beam against a list of
/// transmit beams; returns an n_subbands x n_beams matrix.
arma::cx_mat project_clusters(const ClusterSet& cs, const ClusterPhaseTable& pt,
                              const BeamVector& w, const std::vector<BeamVector>& vs);

/// All codebook-pair effective channels w_i^T H v_j at one subband; returns an
/// rx_cb.size() x tx_cb.size() matrix used for max-SNR beam search.
arma::cx_mat beam_pair_gains(const ClusterSet& cs, const ClusterPhaseTable& pt,
                             const Codebook& rx_cb, const Codebook& tx_cb, int subband);

}  // namespace hbfsim
