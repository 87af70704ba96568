// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hbfsim/array_codebook.hpp"
#include "hbfsim/channel.hpp"

namespace hbfsim {

enum class Direction { downlink = 0, uplink = 1 };

inline int dir_index(Direction d) { return d == Direction::downlink ? 0 : 1; }
inline Direction opposite(Direction d) {
  return d == Direction::downlink ? Direction::uplink : Direction::downlink;
}
inline const char* dir_name(Direction d) { return d == Direction::downlink ? "dl" : "ul"; }

/// Max-SNR codebook pair for one user.
struct CbfEntry {
  int rx_index = 0;
  int tx_index = 0;
  BeamVector rx_beam;  // w^CB, UE side
  BeamVector tx_beam;  // v^CB, BS side
  double gain = 0.0;   // |h_eq|^2 at the reference subband
};

/// Argmax of |gains|^2 over a (rx, tx) gain table; ties resolved toward the
/// lowest (rx index, tx index) pair.
struct BeamPairChoice {
  arma::uword rx = 0;
  arma::uword tx = 0;
  double gain = 0.0;
};
BeamPairChoice cbf_argmax(const arma::cx_mat& pair_gains);

/// Exhaustive max-SNR search over both codebooks at a reference channel.
CbfEntry cbf_select(const arma::cx_mat& h_ref, const Codebook& tx_cb, const Codebook& rx_cb);

/// MU-MIMO reference equivalent channel at one subband: entry (u, p) is
/// sqrt(L_u) w_u^T H_u[k] v_p^CB with one port per UE, desired channels on the
/// diagonal. `channels` and `cbf` are indexed in the same UE order.
arma::cx_mat build_equivalent_matrix(const std::vector<CbfEntry>& cbf,
                                     const std::vector<const ChannelRealization*>& channels,
                                     int subband);

struct MmsePrecoder {
  arma::cx_mat v;            // N_p x N_u
  bool regularized = false;  // noise floor engaged because the solve was singular
};

/// V = Heq^H (Heq Heq^H + noise_ratio I)^-1 via a linear solve. A singular
/// system (noise_ratio ~ 0 against a rank-deficient Heq) is re-solved with a
/// small trace-scaled floor and flagged.
MmsePrecoder mmse_precoder(const arma::cx_mat& heq, double noise_ratio);

struct EffectiveVectors {
  std::vector<BeamVector> vectors;
  arma::vec norms;  // pre-normalization column norms
};

/// Combines codebook port beams through a precoder column-by-column and
/// normalizes each layer to unit transmit power. A zero column means the layer
/// is unservable at this subband.
EffectiveVectors effective_vectors_with_norms(const std::vector<BeamVector>& cb_beams,
                                              const arma::cx_mat& v);
std::vector<BeamVector> effective_vectors(const std::vector<BeamVector>& cb_beams,
                                          const arma::cx_mat& v);

/// Uplink counterpart: the same pipeline applied to Heq^T per subband, giving
/// normalized BS combining vectors for each layer.
std::vector<std::vector<BeamVector>> smbf_ul_combiners(
    const std::vector<BeamVector>& cb_beams, const std::vector<arma::cx_mat>& heq_per_subband,
    double noise_ratio);

/// Beams of one co-scheduled group in one direction. Layers are dense group
/// ordinals; the BS-side vector of a layer at a subband is the mix of the
/// group's codebook port beams through `mix`, normalized per layer. CBF leaves
/// `mix` empty (ports map one-to-one onto layers, frequency-flat).
struct PrecoderSet {
  Direction dir = Direction::downlink;
  std::vector<int> ues;                 // group order == port order == layer order
  std::vector<BeamVector> ue_beams;     // w^CB per UE
  std::vector<BeamVector> port_beams;   // v^CB per port
  arma::cx_cube mix;                    // n_ports x n_layers x n_subbands (or 1 slice if flat)
  arma::mat mix_norm;                   // n_layers x n_subbands (or 1 col); pre-normalization norms
  bool frequency_flat = true;
  std::vector<char> regularized;        // per subband, MMSE floor engaged

  arma::uword n_layers() const { return ues.size(); }
  int layer_of(int ue) const;                       // -1 if the UE is not in the group
  const arma::cx_mat mix_at(int subband) const;     // identity for CBF
  double norm_at(int subband, int layer) const;
  BeamVector bs_vector(int subband, int layer) const;
};

/// Pluggable beam design: "cbf" or "smbf". `heq_at(k)` supplies the group's
/// equivalent channel matrix at subband k (rows and columns in group order,
/// pathloss applied); CBF never calls it.
class BeamformingStrategy {
 public:
  virtual ~BeamformingStrategy() = default;
  virtual std::string_view name() const = 0;
  virtual PrecoderSet design(Direction dir, const std::vector<int>& ues,
                             const std::vector<CbfEntry>& cbf,
                             const std::function<arma::cx_mat(int)>& heq_at, int n_subbands,
                             double noise_ratio) const = 0;
};

std::unique_ptr<BeamformingStrategy> make_strategy(std::string_view name);

}  // namespace hbfsim
