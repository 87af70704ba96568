// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <armadillo>
#include <complex>
#include <vector>

namespace hbfsim {

inline constexpr double kPi = 3.14159265358979323846;

/// Uniform planar array with n1 horizontal and n2 vertical elements.
/// phase_const is the steering-phase constant in radians per unit sine;
/// pi corresponds to half-wavelength element spacing and makes the grid
/// codebook an orthonormal double-DFT basis.
struct ArrayGeometry {
  int n1 = 1;
  int n2 = 1;
  double phase_const = kPi;

  int elements() const { return n1 * n2; }
};

void validate_geometry(const ArrayGeometry& geom);

/// Unit-norm beamforming vector over the elements of one array.
struct BeamVector {
  arma::cx_vec coeffs;

  // Normalizes to unit Euclidean norm; throws on a zero vector.
  static BeamVector unit(arma::cx_vec v);

  arma::uword size() const { return coeffs.n_elem; }
};

/// Ordered set of n1*n2 beam vectors for one array geometry.
struct Codebook {
  std::vector<BeamVector> vectors;
  ArrayGeometry geometry;

  arma::uword size() const { return vectors.size(); }
  const BeamVector& at(arma::uword i) const { return vectors.at(i); }
  arma::cx_mat as_matrix() const;  // columns are the beam vectors
};

// Raw element response with unit-modulus entries (no normalization); element i
// has phase -phase_const*((i mod n1) sin(theta) + floor(i/n1) sin(phi)).
// Used directly when composing channel matrices, where the array gain is
// carried by the channel rather than by the beam vectors.
arma::cx_vec upa_phase_vector(const ArrayGeometry& geom, double theta, double phi);

/// Unit-norm steering vector toward azimuth theta / elevation phi, both
/// restricted to the front half-space [-pi/2, pi/2].
BeamVector upa_response(const ArrayGeometry& geom, double theta, double phi);

/// Grid-angle beam codebook: theta_n = asin(2n/n1 - 1), phi_m = asin(2m/n2 - 1),
/// ordered row-major over (n, m). With phase_const = pi the vectors are the
/// columns of an (n1*n2) x (n1*n2) double DFT matrix and pairwise orthonormal.
Codebook dft_codebook(const ArrayGeometry& geom);

/// Effective scalar channel w^T H v (plain transpose, no conjugation). The
/// uplink channel is the same scalar obtained from (v, H^T, w); the
/// implementation keeps that identity bit-exact.
std::complex<double> effective_channel(const BeamVector& w, const arma::cx_mat& h,
                                       const BeamVector& v);

}  // namespace hbfsim
