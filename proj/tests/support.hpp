#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "oqrw/structure.hpp"

#ifndef OQRW_FIXTURE_DIR
#define OQRW_FIXTURE_DIR "fixtures"
#endif

namespace oqrw::testing {

inline std::string fixture(const std::string& name) { return std::string(OQRW_FIXTURE_DIR) + "/" + name; }

inline WalkModel lr_model(const CMatrix& left, const CMatrix& right) {
  WalkModel m;
  m.lattice_dim = 1;
  m.shifts = {Eigen::VectorXi::Constant(1, -1), Eigen::VectorXi::Constant(1, 1)};
  m.kraus = {left, right};
  return m;
}

// C^2 walk whose unique invariant state is |e1><e1|, drift 1/3.
inline WalkModel two_level() {
  CMatrix l(2, 2), r(2, 2);
  l << std::sqrt(0.5), 0, -std::sqrt(2.0) / 3.0, std::sqrt(1.0 / 3.0);
  r << std::sqrt(1.0 / 6.0), 0, 1.0 / 3.0, std::sqrt(2.0 / 3.0);
  return lr_model(l, r);
}

// C^4 family with transient e0, blocks span{e1,e2} and span{e3};
// p1 + p2 + p3 = 1/2.
inline WalkModel four_level(double p1, double p2, double p3) {
  const double s2 = std::sqrt(2.0);
  CMatrix l = CMatrix::Zero(4, 4), r = CMatrix::Zero(4, 4);
  l(0, 0) = 1.0 / (2.0 * s2);
  l(1, 0) = std::sqrt(p1 / 2.0);
  l(2, 0) = std::sqrt(p2 / 2.0);
  l(3, 0) = -std::sqrt(p3 / 3.0);
  l(1, 1) = l(2, 2) = 1.0 / s2;
  l(3, 3) = std::sqrt(2.0 / 3.0);
  r(0, 0) = std::sqrt(3.0 / 8.0);
  r(1, 0) = -std::sqrt(p1 / 2.0);
  r(2, 0) = -std::sqrt(p2 / 2.0);
  r(3, 0) = std::sqrt(2.0 * p3 / 3.0);
  r(1, 1) = r(2, 2) = 1.0 / s2;
  r(3, 3) = std::sqrt(1.0 / 3.0);
  return lr_model(l, r);
}

// Diagonal Kraus operators L_j = sum_i zeta[i][j] |phi_i><phi_i| in the
// basis given by the columns of `basis` (identity if empty).
inline WalkModel commuting(const std::vector<Eigen::VectorXi>& shifts, const std::vector<std::vector<Complex>>& zeta,
                           const CMatrix& basis = CMatrix()) {
  const auto h = static_cast<Index>(zeta.size());
  const CMatrix u = basis.size() == 0 ? CMatrix::Identity(h, h) : basis;
  WalkModel m;
  m.lattice_dim = static_cast<int>(shifts.front().size());
  m.shifts = shifts;
  for (std::size_t j = 0; j < shifts.size(); ++j) {
    CMatrix d = CMatrix::Zero(h, h);
    for (Index i = 0; i < h; ++i) d(i, i) = zeta[static_cast<std::size_t>(i)][j];
    m.kraus.push_back(u * d * u.adjoint());
  }
  return m;
}

inline std::vector<Eigen::VectorXi> lattice_moves(int d) {
  std::vector<Eigen::VectorXi> s;
  for (int k = 0; k < d; ++k) {
    s.push_back(Eigen::VectorXi::Unit(d, k));
    s.push_back(-Eigen::VectorXi::Unit(d, k));
  }
  return s;
}

inline CMatrix random_unitary(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix z(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

// Generic trace-preserving family: blocks of a random isometry C^h -> C^{hv}.
inline WalkModel random_model(Index h, int d, std::mt19937_64& rng) {
  const auto shifts = lattice_moves(d);
  const auto v = static_cast<Index>(shifts.size());
  const CMatrix u = random_unitary(h * v, rng);
  WalkModel m;
  m.lattice_dim = d;
  m.shifts = shifts;
  for (Index j = 0; j < v; ++j) m.kraus.push_back(u.block(j * h, 0, h, h));
  return m;
}

inline CMatrix random_density(Index h, std::mt19937_64& rng, Index rank = -1) {
  std::normal_distribution<double> g;
  const Index k = rank < 0 ? h : rank;
  CMatrix a(h, k);
  for (Index i = 0; i < h; ++i) {
    for (Index j = 0; j < k; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// Random state supported in a subspace.
inline CMatrix random_density_in(const Subspace& s, std::mt19937_64& rng) {
  const CMatrix inner = random_density(s.dim(), rng);
  return s.basis() * inner * s.basis().adjoint();
}

inline CMatrix ketbra(Index h, Index i) {
  CMatrix m = CMatrix::Zero(h, h);
  m(i, i) = 1.0;
  return m;
}

inline DiagonalState at_origin(const CMatrix& rho0, int d = 1) { return localized_state(rho0, d); }

}  // namespace oqrw::testing
