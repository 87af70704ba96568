// SPDX-License-Identifier: Apache-2.0
#include "hbfsim/beamforming.hpp"

#include <cmath>
#include <stdexcept>

namespace hbfsim {

BeamPairChoice cbf_argmax(const arma::cx_mat& pair_gains) {
  BeamPairChoice best;
  best.gain = -1.0;
  for (arma::uword i = 0; i < pair_gains.n_rows; ++i) {
    for (arma::uword j = 0; j < pair_gains.n_cols; ++j) {
      const double g = std::norm(pair_gains(i, j));
      if (g > best.gain) {
        best = {i, j, g};
      }
    }
  }
  return best;
}

CbfEntry cbf_select(const arma::cx_mat& h_ref, const Codebook& tx_cb, const Codebook& rx_cb) {
  if (h_ref.n_rows != static_cast<arma::uword>(rx_cb.geometry.elements()) ||
      h_ref.n_cols != static_cast<arma::uword>(tx_cb.geometry.elements())) {
    throw std::invalid_argument("cbf_select: channel does not conform to the codebook geometries");
  }
  // All pair gains at once: (W^T H) V, rows rx beams, cols tx beams.
  const arma::cx_mat pair_gains = rx_cb.as_matrix().st() * h_ref * tx_cb.as_matrix();
  const BeamPairChoice c = cbf_argmax(pair_gains);
  CbfEntry e;
  e.rx_index = static_cast<int>(c.rx);
  e.tx_index = static_cast<int>(c.tx);
  e.rx_beam = rx_cb.at(c.rx);
  e.tx_beam = tx_cb.at(c.tx);
  e.gain = c.gain;
  return e;
}

arma::cx_mat build_equivalent_matrix(const std::vector<CbfEntry>& cbf,
                                     const std::vector<const ChannelRealization*>& channels,
                                     int subband) {
  if (cbf.size() != channels.size() || cbf.empty()) {
    throw std::invalid_argument("build_equivalent_matrix: UE sets do not match");
  }
  const std::size_t n = cbf.size();
  arma::cx_mat heq(n, n);
  for (std::size_t u = 0; u < n; ++u) {
    const ChannelRealization& cr = *channels[u];
    const double sqrt_l = std::sqrt(cr.linear_gain());
    const arma::cx_mat& h = cr.subbands.at(subband);
    for (std::size_t p = 0; p < n; ++p) {
      heq(u, p) = sqrt_l * effective_channel(cbf[u].rx_beam, h, cbf[p].tx_beam);
    }
  }
  return heq;
}

MmsePrecoder mmse_precoder(const arma::cx_mat& heq, double noise_ratio) {
  if (noise_ratio < 0.0) throw std::invalid_argument("mmse_precoder: noise_ratio must be >= 0");
  const arma::uword n_u = heq.n_rows;
  const arma::cx_mat gram = heq * heq.t();

  const auto attempt = [&](double nr, arma::cx_mat& out) {
    const arma::cx_mat a = gram + nr * arma::eye<arma::cx_mat>(n_u, n_u);
    arma::cx_mat y;
    const bool ok = arma::solve(y, a, heq, arma::solve_opts::no_approx);
    if (!ok || !y.is_finite()) return false;
    out = y.t();  // V = Heq^H A^-1 and A is hermitian
    return true;
  };

  MmsePrecoder result;
  if (attempt(noise_ratio, result.v)) {
    return result;
  }
  const double floor = 1e-12 * std::abs(arma::trace(gram)) / static_cast<double>(n_u);
  result.regularized = true;
  if (!attempt(std::max(noise_ratio, floor), result.v)) {
    // Degenerate even with the floor (e.g. Heq == 0): fall back to the
    // matched filter direction, which is zero in that case.
    result.v = heq.t();
  }
  return result;
}

EffectiveVectors effective_vectors_with_norms(const std::vector<BeamVector>& cb_beams,
                                              const arma::cx_mat& v) {
  if (cb_beams.size() != v.n_rows) {
    throw std::invalid_argument("effective_vectors: precoder rows do not match the port count");
  }
  if (cb_beams.empty()) throw std::invalid_argument("effective_vectors: no port beams");
  const arma::uword n_el = cb_beams.front().size();
  arma::cx_mat ports(n_el, cb_beams.size());
  for (std::size_t p = 0; p < cb_beams.size(); ++p) ports.col(p) = cb_beams[p].coeffs;

  EffectiveVectors out;
  out.norms.set_size(v.n_cols);
  out.vectors.reserve(v.n_cols);
  for (arma::uword u = 0; u < v.n_cols; ++u) {
    arma::cx_vec mixed = ports * v.col(u);
    const double n = arma::norm(mixed, 2);
    if (!(n > 0.0)) {
      throw std::invalid_argument("effective_vectors: layer " + std::to_string(u) +
                                  " has a zero-norm effective vector (unservable)");
    }
    out.norms[u] = n;
    out.vectors.push_back(BeamVector{mixed / n});
  }
  return out;
}

std::vector<BeamVector> effective_vectors(const std::vector<BeamVector>& cb_beams,
                                          const arma::cx_mat& v) {
  return effective_vectors_with_norms(cb_beams, v).vectors;
}

std::vector<std::vector<BeamVector>> smbf_ul_combiners(
    const std::vector<BeamVector>& cb_beams, const std::vector<arma::cx_mat>& heq_per_subband,
    double noise_ratio) {
  std::vector<std::vector<BeamVector>> out;
  out.reserve(heq_per_subband.size());
  for (const arma::cx_mat& heq : heq_per_subband) {
    // Transposed pipeline; the result is (UE x layer), so transposing back
    // yields the (port x layer) combining weights, for which Heq W -> I in the
    // low-noise limit.
    const MmsePrecoder w = mmse_precoder(heq.st(), noise_ratio);
    out.push_back(effective_vectors(cb_beams, w.v.st()));
  }
  return out;
}

int PrecoderSet::layer_of(int ue) const {
  for (std::size_t i = 0; i < ues.size(); ++i) {
    if (ues[i] == ue) return static_cast<int>(i);
  }
  return -1;
}

const arma::cx_mat PrecoderSet::mix_at(int subband) const {
  if (mix.is_empty()) {
    return arma::eye<arma::cx_mat>(n_layers(), n_layers());
  }
  return mix.slice(frequency_flat ? 0 : subband);
}

double PrecoderSet::norm_at(int subband, int layer) const {
  if (mix_norm.is_empty()) return 1.0;
  return mix_norm(layer, frequency_flat ? 0 : subband);
}

BeamVector PrecoderSet::bs_vector(int subband, int layer) const {
  if (mix.is_empty()) {
    return port_beams.at(layer);  // CBF: ports are the layers
  }
  const arma::cx_mat m = mix_at(subband);
  return effective_vectors_with_norms(port_beams, m.col(layer)).vectors.front();
}

namespace {

class CbfStrategy final : public BeamformingStrategy {
 public:
  std::string_view name() const override { return "cbf"; }

  PrecoderSet design(Direction dir, const std::vector<int>& ues, const std::vector<CbfEntry>& cbf,
                     const std::function<arma::cx_mat(int)>&, int, double) const override {
    PrecoderSet ps;
    ps.dir = dir;
    ps.ues = ues;
    for (std::size_t i = 0; i < ues.size(); ++i) {
      ps.ue_beams.push_back(cbf[i].rx_beam);
      ps.port_beams.push_back(cbf[i].tx_beam);
    }
    ps.frequency_flat = true;
    return ps;
  }
};

class SmbfStrategy final : public BeamformingStrategy {
 public:
  std::string_view name() const override { return "smbf"; }

  PrecoderSet design(Direction dir, const std::vector<int>& ues, const std::vector<CbfEntry>& cbf,
                     const std::function<arma::cx_mat(int)>& heq_at, int n_subbands,
                     double noise_ratio) const override {
    PrecoderSet ps;
    ps.dir = dir;
    ps.ues = ues;
    for (std::size_t i = 0; i < ues.size(); ++i) {
      ps.ue_beams.push_back(cbf[i].rx_beam);
      ps.port_beams.push_back(cbf[i].tx_beam);
    }
    const arma::uword m = ues.size();
    ps.frequency_flat = false;
    ps.mix.set_size(m, m, n_subbands);
    ps.mix_norm.set_size(m, n_subbands);
    ps.regularized.assign(n_subbands, 0);
    for (int k = 0; k < n_subbands; ++k) {
      const arma::cx_mat heq = heq_at(k);
      const MmsePrecoder pre =
          mmse_precoder(dir == Direction::uplink ? arma::cx_mat(heq.st()) : heq, noise_ratio);
      // Uplink: transpose back into (port x layer) weight layout.
      const arma::cx_mat w = dir == Direction::uplink ? arma::cx_mat(pre.v.st()) : pre.v;
      ps.regularized[k] = pre.regularized ? 1 : 0;
      const EffectiveVectors ev = effective_vectors_with_norms(ps.port_beams, w);
      ps.mix.slice(k) = w;
      ps.mix_norm.col(k) = ev.norms;
    }
    return ps;
  }
};

}  // namespace

std::unique_ptr<BeamformingStrategy> make_strategy(std::string_view name) {
  if (name == "cbf") return std::make_unique<CbfStrategy>();
  if (name == "smbf") return std::make_unique<SmbfStrategy>();
  throw std::invalid_argument("unknown beamforming strategy: " + std::string(name));
}

}  // namespace hbfsim
