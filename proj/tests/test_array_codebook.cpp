// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <armadillo>
#include <complex>

#include "doctest.h"
#include "hbfsim/array_codebook.hpp"
#include "hbfsim/rng.hpp"

using namespace hbfsim;
using cx = std::complex<double>;

namespace {

arma::cx_mat random_cx_mat(arma::uword r, arma::uword c, Rng& rng) {
  arma::cx_mat m(r, c);
  for (auto& v : m) v = rng.cgauss();
  return m;
}

BeamVector random_unit(arma::uword n, Rng& rng) {
  arma::cx_vec v(n);
  for (auto& x : v) x = rng.cgauss();
  return BeamVector::unit(v);
}

// Independent oracle: plain double loop, no shared code with the
// implementation's traversal.
cx brute_force_heq(const BeamVector& w, const arma::cx_mat& h, const BeamVector& v) {
  cx sum = 0.0;
  for (arma::uword r = 0; r < h.n_rows; ++r) {
    for (arma::uword c = 0; c < h.n_cols; ++c) {
      sum += w.coeffs[r] * h(r, c) * v.coeffs[c];
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("upa_response at zero angles is the uniform vector") {
  const BeamVector b = upa_response({2, 2, kPi}, 0.0, 0.0);
  REQUIRE(b.size() == 4);
  for (arma::uword i = 0; i < 4; ++i) {
    CHECK(std::abs(b.coeffs[i] - cx(0.5, 0.0)) < 1e-12);
  }
}

TEST_CASE("upa_response at theta=pi/2 on a 2x1 array alternates sign") {
  const BeamVector b = upa_response({2, 1, kPi}, kPi / 2.0, 0.0);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(b.coeffs[0] - cx(s, 0.0)) < 1e-12);
  CHECK(std::abs(b.coeffs[1] - cx(-s, 0.0)) < 1e-12);
}

TEST_CASE("upa_response at a grid angle matches the codebook column") {
  // 4x2 array, theta = asin(-0.5) = asin(2*1/4 - 1), phi = asin(0) = asin(2*1/2 - 1):
  // grid indices n=1, m=1 -> codebook position n*n2 + m = 3.
  const ArrayGeometry geom{4, 2, kPi};
  const Codebook cb = dft_codebook(geom);
  const BeamVector b = upa_response(geom, std::asin(-0.5), std::asin(0.0));
  arma::cx_rowvec grams = b.coeffs.t() * cb.as_matrix();  // hermitian inner products
  arma::uword best = 0;
  double best_mag = 0.0;
  for (arma::uword j = 0; j < grams.n_elem; ++j) {
    if (std::abs(grams[j]) > best_mag) {
      best_mag = std::abs(grams[j]);
      best = j;
    }
  }
  CHECK(best == 3);
  CHECK(std::abs(grams[best] - cx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("upa_response rejects angles outside the half-space") {
  CHECK_THROWS_AS(upa_response({2, 2, kPi}, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(upa_response({2, 2, kPi}, 0.0, -2.0), std::invalid_argument);
}

TEST_CASE("dft_codebook on a 2x1 array gives the two expected vectors") {
  const Codebook cb = dft_codebook({2, 1, kPi});
  REQUIRE(cb.size() == 2);
  const double s = 1.0 / std::sqrt(2.0);
  // n=0: theta = asin(-1) -> (1, -1)/sqrt(2); n=1: theta = asin(0) -> (1, 1)/sqrt(2).
  CHECK(std::abs(cb.at(0).coeffs[0] - cx(s, 0.0)) < 1e-12);
  CHECK(std::abs(cb.at(0).coeffs[1] - cx(-s, 0.0)) < 1e-12);
  CHECK(std::abs(cb.at(1).coeffs[0] - cx(s, 0.0)) < 1e-12);
  CHECK(std::abs(cb.at(1).coeffs[1] - cx(s, 0.0)) < 1e-12);
}

TEST_CASE("dft_codebook 2x2 vectors are pairwise orthogonal") {
  const Codebook cb = dft_codebook({2, 2, kPi});
  REQUIRE(cb.size() == 4);
  for (arma::uword i = 0; i < 4; ++i) {
    for (arma::uword j = 0; j < 4; ++j) {
      const cx g = arma::cdot(cb.at(i).coeffs, cb.at(j).coeffs);
      if (i == j) {
        CHECK(std::abs(g - cx(1.0, 0.0)) < 1e-12);
      } else {
        CHECK(std::abs(g) < 1e-12);
      }
    }
  }
}

TEST_CASE("dft_codebook degenerates to (1) for a single element") {
  const Codebook cb = dft_codebook({1, 1, kPi});
  REQUIRE(cb.size() == 1);
  CHECK(std::abs(cb.at(0).coeffs[0] - cx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("dft_codebook gram matrix is the identity for all n1, n2 <= 16") {
  for (int n1 : {1, 2, 3, 5, 8, 16}) {
    for (int n2 : {1, 2, 4, 7, 16}) {
      const Codebook cb = dft_codebook({n1, n2, kPi});
      const arma::cx_mat m = cb.as_matrix();
      const arma::cx_mat gram = m.t() * m;
      const double dev = arma::norm(gram - arma::eye<arma::cx_mat>(m.n_cols, m.n_cols), "fro");
      CAPTURE(n1);
      CAPTURE(n2);
      CHECK(dev <= 1e-12 * std::max<double>(1.0, m.n_cols));
    }
  }
}

TEST_CASE("effective_channel scalar and basis selection cases") {
  const BeamVector one{arma::cx_vec{cx(1.0, 0.0)}};
  arma::cx_mat h11(1, 1);
  h11(0, 0) = cx(3.0, 4.0);
  CHECK(effective_channel(one, h11, one) == cx(3.0, 4.0));

  Rng rng(7);
  arma::cx_mat h = random_cx_mat(3, 3, rng);
  arma::cx_vec e0(3, arma::fill::zeros), e1(3, arma::fill::zeros);
  e0[0] = 1.0;
  e1[1] = 1.0;
  const cx got = effective_channel(BeamVector{e0}, h, BeamVector{e1});
  CHECK(std::abs(got - h(0, 1)) < 1e-15);
}

TEST_CASE("effective_channel matches the brute-force double loop") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const arma::cx_mat h = random_cx_mat(4, 4, rng);
    const BeamVector w = random_unit(4, rng);
    const BeamVector v = random_unit(4, rng);
    const cx got = effective_channel(w, h, v);
    const cx expect = brute_force_heq(w, h, v);
    CHECK(std::abs(got - expect) <= 1e-12 * std::abs(expect));
  }
}

TEST_CASE("effective_channel rejects non-conforming dimensions") {
  Rng rng(3);
  const arma::cx_mat h = random_cx_mat(3, 5, rng);
  CHECK_THROWS_AS(effective_channel(random_unit(4, rng), h, random_unit(5, rng)),
                  std::invalid_argument);
  CHECK_THROWS_AS(effective_channel(random_unit(3, rng), h, random_unit(4, rng)),
                  std::invalid_argument);
}

TEST_CASE("reciprocity is bit-exact, including non-square channels") {
  Rng rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const arma::uword rows = 1 + rng.integer(6);
    const arma::uword cols = 1 + rng.integer(6);
    const arma::cx_mat h = random_cx_mat(rows, cols, rng);
    const BeamVector w = random_unit(rows, rng);
    const BeamVector v = random_unit(cols, rng);
    const cx a = effective_channel(w, h, v);
    const cx b = effective_channel(v, h.st(), w);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == b.imag());
  }
}

TEST_CASE("effective channel power is bounded by the largest singular value") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const arma::cx_mat h = random_cx_mat(5, 7, rng);
    const BeamVector w = random_unit(5, rng);
    const BeamVector v = random_unit(7, rng);
    const arma::vec sv = arma::svd(h);
    const double bound = sv.max() * sv.max();
    CHECK(std::norm(effective_channel(w, h, v)) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("rank-1 grid channel is maximized by the matching codebook pair") {
  const ArrayGeometry rx_geom{2, 2, kPi};
  const ArrayGeometry tx_geom{4, 2, kPi};
  const Codebook rx_cb = dft_codebook(rx_geom);
  const Codebook tx_cb = dft_codebook(tx_geom);
  const double theta_r = std::asin(2.0 * 1 / 2 - 1.0);
  const double phi_r = std::asin(2.0 * 1 / 2 - 1.0);
  const double theta_t = std::asin(2.0 * 2 / 4 - 1.0);
  const double phi_t = std::asin(2.0 * 0 / 2 - 1.0);
  const arma::cx_mat h = arma::conj(upa_phase_vector(rx_geom, theta_r, phi_r)) *
                         arma::conj(upa_phase_vector(tx_geom, theta_t, phi_t)).st();

  double best = 0.0;
  double at_grid_pair = 0.0;
  for (arma::uword i = 0; i < rx_cb.size(); ++i) {
    for (arma::uword j = 0; j < tx_cb.size(); ++j) {
      const double g = std::norm(effective_channel(rx_cb.at(i), h, tx_cb.at(j)));
      best = std::max(best, g);
      if (i == 1 * 2 + 1 && j == 2 * 2 + 0) at_grid_pair = g;
    }
  }
  CHECK(at_grid_pair == doctest::Approx(best).epsilon(1e-12));
  CHECK(best == doctest::Approx(4.0 * 8.0).epsilon(1e-12));
}

TEST_CASE("geometry and beam vector validation") {
  CHECK_THROWS_AS(validate_geometry({0, 2, kPi}), std::invalid_argument);
  CHECK_THROWS_AS(validate_geometry({2, 2, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(BeamVector::unit(arma::cx_vec(3, arma::fill::zeros)), std::invalid_argument);
  Rng rng(5);
  const BeamVector b = random_unit(6, rng);
  CHECK(std::abs(arma::norm(b.coeffs, 2) - 1.0) < 1e-12);
}
