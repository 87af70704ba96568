// SPDX-License-Identifier: Apache-2.0
#include "hbfsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace hbfsim {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// A UPA steered by sin(angle) cannot distinguish a bearing from its mirror
// about the array plane (sin(pi - x) = sin(x)), so folding global bearings
// into [-pi/2, pi/2] is exact for the array response.
double fold_to_half_space(double angle) { return std::asin(std::sin(angle)); }

std::complex<double> draw_cluster_gain(const ClusterSet& cs, std::size_t l, Rng& rng) {
  if (l == 0) {
    const double phase = kTwoPi * rng.uniform();
    std::complex<double> g = cs.diffuse_std * rng.cgauss();
    g += std::polar(cs.specular_amp, phase);
    return g;
  }
  return cs.diffuse_std * rng.cgauss();
}

}  // namespace

std::vector<Placement> drop_ues(int n_ues, double radius_m, double h_bs_m, double h_ut_m,
                                Rng& rng) {
  if (n_ues < 1) throw std::invalid_argument("drop_ues: n_ues must be >= 1");
  if (!(radius_m >= 0.0)) throw std::invalid_argument("drop_ues: radius must be >= 0");
  std::vector<Placement> out;
  out.reserve(n_ues);
  for (int u = 0; u < n_ues; ++u) {
    // r = R sqrt(U) gives a uniform density over the disc area.
    const double r = radius_m * std::sqrt(rng.uniform());
    const double ang = kTwoPi * rng.uniform();
    Placement p;
    p.ue_id = u;
    p.position = {r * std::cos(ang), r * std::sin(ang), h_ut_m};
    p.bs_position = {0.0, 0.0, h_bs_m};
    p.d2d = r;
    p.d3d = std::hypot(r, h_bs_m - h_ut_m);
    out.push_back(p);
  }
  return out;
}

PathlossResult pathloss_uma(const Placement& p, double fc_ghz, bool shadowing, Rng& rng) {
  if (fc_ghz < 0.5 || fc_ghz > 100.0) {
    throw std::invalid_argument("pathloss_uma: fc_ghz out of range [0.5, 100]");
  }
  const double dh = p.bs_position[2] - p.position[2];
  const double h_ut = p.position[2];
  const double d2d = std::max(p.d2d, 10.0);
  const double d3d = std::hypot(d2d, dh);

  // UMa LOS probability (UE below 13 m, no high-rise correction).
  double p_los = 1.0;
  if (d2d > 18.0) {
    p_los = 18.0 / d2d + std::exp(-d2d / 63.0) * (1.0 - 18.0 / d2d);
  }
  const bool los = rng.uniform() < p_los;

  const double pl_los = 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
  double pl = pl_los;
  if (!los) {
    const double pl_nlos = 13.54 + 39.08 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
                           0.6 * (h_ut - 1.5);
    pl = std::max(pl_los, pl_nlos);
  }
  if (shadowing) {
    pl += (los ? 4.0 : 6.0) * rng.normal();
  }
  return {pl, los};
}

ClusterSet generate_clusters(const Placement& p, const ArrayGeometry& rx_geom,
                             const ArrayGeometry& tx_geom, const ClusterParams& prm, Rng& rng) {
  if (prm.n_clusters < 1) throw std::invalid_argument("generate_clusters: n_clusters must be >= 1");
  ClusterSet cs;
  cs.rx_geom = rx_geom;
  cs.tx_geom = tx_geom;
  cs.los = p.los;

  const double k_lin = p.los ? std::pow(10.0, prm.k_factor_db / 10.0) : 0.0;
  cs.specular_amp = std::sqrt(k_lin / (k_lin + 1.0));
  cs.diffuse_std = std::sqrt(1.0 / ((k_lin + 1.0) * prm.n_clusters));

  const double dx = p.position[0] - p.bs_position[0];
  const double dy = p.position[1] - p.bs_position[1];
  const double dz = p.position[2] - p.bs_position[2];
  const double aod_az = std::atan2(dy, dx);
  const double aod_el = std::atan2(dz, p.d2d);
  const double aoa_az = std::atan2(-dy, -dx);
  const double aoa_el = std::atan2(-dz, p.d2d);

  cs.clusters.resize(prm.n_clusters);
  for (int l = 0; l < prm.n_clusters; ++l) {
    Cluster& c = cs.clusters[l];
    if (l == 0) {
      c.aod_az = fold_to_half_space(aod_az);
      c.aod_el = fold_to_half_space(aod_el);
      c.aoa_az = fold_to_half_space(aoa_az);
      c.aoa_el = fold_to_half_space(aoa_el);
      c.delay_s = 0.0;
    } else {
      c.aod_az = fold_to_half_space(aod_az + prm.angle_spread_rad * rng.normal());
      c.aod_el = fold_to_half_space(aod_el + prm.angle_spread_rad * rng.normal());
      c.aoa_az = fold_to_half_space(aoa_az + prm.angle_spread_rad * rng.normal());
      c.aoa_el = fold_to_half_space(aoa_el + prm.angle_spread_rad * rng.normal());
      c.delay_s = rng.exponential(prm.delay_spread_s);
    }
    c.gain = draw_cluster_gain(cs, l, rng);
  }
  return cs;
}

arma::cx_mat channel_at(const ClusterSet& cs, double f_offset_hz) {
  const int n_rx = cs.rx_geom.elements();
  const int n_tx = cs.tx_geom.elements();
  arma::cx_mat h(n_rx, n_tx, arma::fill::zeros);
  for (const Cluster& c : cs.clusters) {
    const std::complex<double> w =
        c.gain * std::polar(1.0, -kTwoPi * c.delay_s * f_offset_hz);
    const arma::cx_vec a_rx = upa_phase_vector(cs.rx_geom, c.aoa_az, c.aoa_el);
    const arma::cx_vec a_tx = upa_phase_vector(cs.tx_geom, c.aod_az, c.aod_el);
    h += w * (a_rx * a_tx.st());
  }
  return h;
}

ChannelRealization realize_channel(const ClusterSet& cs, int ue_id, double pathloss_db,
                                   const SubbandGrid& grid, double timestamp_s) {
  ChannelRealization cr;
  cr.ue_id = ue_id;
  cr.pathloss_db = pathloss_db;
  cr.timestamp_s = timestamp_s;
  cr.grid = grid;
  cr.subbands.reserve(grid.n_subbands);

  const std::size_t n_cl = cs.clusters.size();
  arma::cx_mat a_rx(cs.rx_geom.elements(), n_cl);
  arma::cx_mat a_tx_t(n_cl, cs.tx_geom.elements());
  arma::cx_vec gains(n_cl);
  arma::vec delays(n_cl);
  for (std::size_t l = 0; l < n_cl; ++l) {
    const Cluster& c = cs.clusters[l];
    a_rx.col(l) = upa_phase_vector(cs.rx_geom, c.aoa_az, c.aoa_el);
    a_tx_t.row(l) = upa_phase_vector(cs.tx_geom, c.aod_az, c.aod_el).st();
    gains[l] = c.gain;
    delays[l] = c.delay_s;
  }
  for (int k = 0; k < grid.n_subbands; ++k) {
    const double f = grid.offset_hz(k);
    arma::cx_vec c(n_cl);
    for (std::size_t l = 0; l < n_cl; ++l) {
      c[l] = gains[l] * std::polar(1.0, -kTwoPi * delays[l] * f);
    }
    cr.subbands.emplace_back(a_rx * arma::diagmat(c) * a_tx_t);
  }
  return cr;
}

double coherence_rho(double dt_s, double t_coh_s) {
  if (!(t_coh_s > 0.0)) return 0.0;
  return std::exp(-dt_s / t_coh_s);
}

void evolve_gains(ClusterSet& cs, double rho, Rng& rng) {
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("evolve: rho must lie in [0, 1]");
  const double mix = std::sqrt(1.0 - rho * rho);
  for (std::size_t l = 0; l < cs.clusters.size(); ++l) {
    const std::complex<double> innovation = draw_cluster_gain(cs, l, rng);
    cs.clusters[l].gain = rho * cs.clusters[l].gain + mix * innovation;
  }
}

ChannelRealization evolve(const ChannelRealization& cr, ClusterSet& cs, double dt_s, double rho,
                          Rng& rng) {
  evolve_gains(cs, rho, rng);
  return realize_channel(cs, cr.ue_id, cr.pathloss_db, cr.grid, cr.timestamp_s + dt_s);
}

ClusterPhaseTable make_phase_table(const ClusterSet& cs, const SubbandGrid& grid) {
  ClusterPhaseTable pt;
  pt.phase.set_size(grid.n_subbands, cs.clusters.size());
  for (std::size_t l = 0; l < cs.clusters.size(); ++l) {
    const double d = cs.clusters[l].delay_s;
    for (int k = 0; k < grid.n_subbands; ++k) {
      pt.phase(k, l) = std::polar(1.0, -kTwoPi * d * grid.offset_hz(k));
    }
  }
  return pt;
}

arma::cx_mat project_clusters(const ClusterSet& cs, const ClusterPhaseTable& pt,
                              const BeamVector& w, const std::vector<BeamVector>& vs) {
  const std::size_t n_cl = cs.clusters.size();
  if (pt.phase.n_cols != n_cl) {
    throw std::invalid_argument("project_clusters: phase table does not match cluster set");
  }
  arma::cx_rowvec alpha(n_cl);   // w^T a_rx,l
  arma::cx_mat beta(n_cl, vs.size());  // a_tx,l^T v_j
  for (std::size_t l = 0; l < n_cl; ++l) {
    const Cluster& c = cs.clusters[l];
    const arma::cx_vec a_rx = upa_phase_vector(cs.rx_geom, c.aoa_az, c.aoa_el);
    const arma::cx_vec a_tx = upa_phase_vector(cs.tx_geom, c.aod_az, c.aod_el);
    alpha[l] = arma::as_scalar(w.coeffs.st() * a_rx);
    for (std::size_t j = 0; j < vs.size(); ++j) {
      beta(l, j) = arma::as_scalar(a_tx.st() * vs[j].coeffs);
    }
  }
  arma::cx_rowvec weights(n_cl);
  for (std::size_t l = 0; l < n_cl; ++l) weights[l] = alpha[l] * cs.clusters[l].gain;
  // out(k, j) = sum_l weights_l phase(k, l) beta(l, j)
  return (pt.phase.each_row() % weights) * beta;
}

arma::cx_mat beam_pair_gains(const ClusterSet& cs, const ClusterPhaseTable& pt,
                             const Codebook& rx_cb, const Codebook& tx_cb, int subband) {
  const std::size_t n_cl = cs.clusters.size();
  arma::cx_mat p(rx_cb.size(), n_cl);   // w_i^T a_rx,l
  arma::cx_mat q(n_cl, tx_cb.size());   // a_tx,l^T v_j
  for (std::size_t l = 0; l < n_cl; ++l) {
    const Cluster& c = cs.clusters[l];
    const arma::cx_vec a_rx = upa_phase_vector(cs.rx_geom, c.aoa_az, c.aoa_el);
    const arma::cx_vec a_tx = upa_phase_vector(cs.tx_geom, c.aod_az, c.aod_el);
    for (arma::uword i = 0; i < rx_cb.size(); ++i) {
      p(i, l) = arma::as_scalar(rx_cb.at(i).coeffs.st() * a_rx);
    }
    for (arma::uword j = 0; j < tx_cb.size(); ++j) {
      q(l, j) = arma::as_scalar(a_tx.st() * tx_cb.at(j).coeffs);
    }
  }
  arma::cx_vec c(n_cl);
  for (std::size_t l = 0; l < n_cl; ++l) {
    c[l] = cs.clusters[l].gain * pt.phase(subband, l);
  }
  return p * arma::diagmat(c) * q;
}

}  // namespace hbfsim
