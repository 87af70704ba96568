// SPDX-License-Identifier: Apache-2.0
#include "hbfsim/array_codebook.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hbfsim {

void validate_geometry(const ArrayGeometry& geom) {
  if (geom.n1 < 1 || geom.n2 < 1) {
    throw std::invalid_argument("ArrayGeometry: n1 and n2 must be >= 1");
  }
  if (!(geom.phase_const > 0.0)) {
    throw std::invalid_argument("ArrayGeometry: phase_const must be > 0");
  }
}

BeamVector BeamVector::unit(arma::cx_vec v) {
  const double n = arma::norm(v, 2);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("BeamVector: cannot normalize a zero or non-finite vector");
  }
  v /= n;
  return BeamVector{std::move(v)};
}

arma::cx_mat Codebook::as_matrix() const {
  arma::cx_mat m(geometry.elements(), vectors.size());
  for (arma::uword j = 0; j < vectors.size(); ++j) {
    m.col(j) = vectors[j].coeffs;
  }
  return m;
}

arma::cx_vec upa_phase_vector(const ArrayGeometry& geom, double theta, double phi) {
  validate_geometry(geom);
  constexpr double kHalfPi = kPi / 2.0;
  constexpr double kTol = 1e-12;
  if (std::abs(theta) > kHalfPi + kTol || std::abs(phi) > kHalfPi + kTol) {
    throw std::invalid_argument("upa_response: angles must lie in [-pi/2, pi/2], got theta=" +
                                std::to_string(theta) + " phi=" + std::to_string(phi));
  }
  const int n = geom.elements();
  const double st = std::sin(theta);
  const double sp = std::sin(phi);
  arma::cx_vec a(n);
  for (int i = 0; i < n; ++i) {
    const double phase = -geom.phase_const * ((i % geom.n1) * st + (i / geom.n1) * sp);
    a[i] = std::polar(1.0, phase);
  }
  return a;
}

BeamVector upa_response(const ArrayGeometry& geom, double theta, double phi) {
  arma::cx_vec a = upa_phase_vector(geom, theta, phi);
  a /= std::sqrt(static_cast<double>(geom.elements()));
  return BeamVector{std::move(a)};
}

Codebook dft_codebook(const ArrayGeometry& geom) {
  validate_geometry(geom);
  Codebook cb;
  cb.geometry = geom;
  cb.vectors.reserve(geom.elements());
  for (int n = 0; n < geom.n1; ++n) {
    const double theta = std::asin(2.0 * n / geom.n1 - 1.0);
    for (int m = 0; m < geom.n2; ++m) {
      const double phi = std::asin(2.0 * m / geom.n2 - 1.0);
      cb.vectors.push_back(upa_response(geom, theta, phi));
    }
  }
  return cb;
}

std::complex<double> effective_channel(const BeamVector& w, const arma::cx_mat& h,
                                       const BeamVector& v) {
  const arma::uword rows = h.n_rows;
  const arma::uword cols = h.n_cols;
  if (w.size() != rows || v.size() != cols) {
    throw std::invalid_argument("effective_channel: dimension mismatch (w " +
                                std::to_string(w.size()) + ", H " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", v " + std::to_string(v.size()) + ")");
  }
  // Terms w_r * v_c * H(r,c) are accumulated along anti-diagonals, adding each
  // mirror pair {(a,b),(b,a)} as a unit. The traversal maps onto itself under
  // (w,H,v) -> (v,H^T,w), so reciprocity holds bit-exactly, not just to
  // rounding error.
  const auto term = [&](arma::uword r, arma::uword c) {
    return (w.coeffs[r] * v.coeffs[c]) * h(r, c);
  };
  std::complex<double> sum = 0.0;
  const arma::uword smax = rows + cols >= 2 ? rows + cols - 2 : 0;
  for (arma::uword s = 0; s <= smax; ++s) {
    for (arma::uword a = 0; 2 * a <= s; ++a) {
      const arma::uword b = s - a;
      if (a == b) {
        if (a < rows && a < cols) sum += term(a, a);
        continue;
      }
      std::complex<double> pair = 0.0;
      if (a < rows && b < cols) pair += term(a, b);
      if (b < rows && a < cols) pair += term(b, a);
      sum += pair;
    }
  }
  return sum;
}

}  // namespace hbfsim
