#include "oqrw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace oqrw {

namespace {

Eigen::JacobiSVD<CMatrix> full_svd(const CMatrix& m) {
  return Eigen::JacobiSVD<CMatrix>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

}  // namespace

Subspace Subspace::from_orthonormal(CMatrix basis) {
  const Index k = basis.cols();
  if (k > 0) {
    const CMatrix gram = basis.adjoint() * basis;
    const double dev = (gram - CMatrix::Identity(k, k)).norm();
    if (dev > kTolOrtho * std::max<double>(1.0, static_cast<double>(k))) {
      throw Error(ErrorCode::InvalidState,
                  "subspace basis is not orthonormal (Gram deviation " + std::to_string(dev) + ")");
    }
  }
  Subspace s(basis.rows());
  s.basis_ = std::move(basis);
  return s;
}

Subspace Subspace::span(const CMatrix& vectors, double rel_tol) {
  Subspace s(vectors.rows());
  if (vectors.cols() == 0 || vectors.rows() == 0) return s;
  const auto svd = full_svd(vectors);
  const RVector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return s;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > rel_tol * sv(0)) ++rank;
  s.basis_ = svd.matrixU().leftCols(rank);
  return s;
}

Subspace Subspace::full(Index ambient_dim) {
  Subspace s(ambient_dim);
  s.basis_ = CMatrix::Identity(ambient_dim, ambient_dim);
  return s;
}

Subspace Subspace::coordinates(Index ambient_dim, const std::vector<Index>& indices) {
  CMatrix b = CMatrix::Zero(ambient_dim, static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) b(indices[k], static_cast<Index>(k)) = 1.0;
  return from_orthonormal(std::move(b));
}

double hermitian_deviation(const CMatrix& h) { return (h - h.adjoint()).norm(); }

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

HermitianEigen eig_hermitian(const CMatrix& h) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::DimensionMismatch, "eig_hermitian needs a square matrix");
  const double scale = std::max(1.0, h.norm());
  if (hermitian_deviation(h) > 1e-10 * scale) {
    throw Error(ErrorCode::NotHermitian, "deviation " + std::to_string(hermitian_deviation(h)));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
  const Index n = h.rows();
  HermitianEigen out{RVector(n), CMatrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

Projector support_projection(const CMatrix& h, double tol) {
  const double fro = h.norm();
  if (hermitian_deviation(h) > tol * std::max(1.0, fro)) {
    throw Error(ErrorCode::NotHermitian, "deviation " + std::to_string(hermitian_deviation(h)));
  }
  const HermitianEigen eig = eig_hermitian(hermitian_part(h));
  const double norm = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
  if (eig.values.size() && eig.values.minCoeff() < -tol * std::max(norm, 1e-300)) {
    throw Error(ErrorCode::NegativeEigenvalue, "min eigenvalue " + std::to_string(eig.values.minCoeff()));
  }
  Index rank = 0;
  while (rank < eig.values.size() && eig.values(rank) > tol * norm) ++rank;
  Subspace s = Subspace::from_orthonormal(eig.vectors.leftCols(rank));
  return Projector{s.projector(), s};
}

DominantEigen eig_dominant(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "eig_dominant needs a nonempty square matrix");
  }
  Eigen::ComplexEigenSolver<CMatrix> es;
  es.setMaxIterations(10000);
  es.compute(m, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "complex Schur iteration failed");

  const CVector& ev = es.eigenvalues();
  const double max_mod = ev.cwiseAbs().maxCoeff();
  Index best = -1;
  for (Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k)) < max_mod * (1.0 - 1e-9) - 1e-300) continue;
    if (best < 0) {
      best = k;
      continue;
    }
    const Complex a = ev(k), b = ev(best);
    if (a.real() > b.real() + 1e-12 * std::max(1.0, max_mod) ||
        (std::abs(a.real() - b.real()) <= 1e-12 * std::max(1.0, max_mod) &&
         std::abs(a.imag()) < std::abs(b.imag()))) {
      best = k;
    }
  }
  DominantEigen out;
  out.value = ev(best);
  out.right = es.eigenvectors().col(best).normalized();

  const Index n = m.rows();
  const CMatrix shifted = m - out.value * CMatrix::Identity(n, n);
  {
    const auto svd = full_svd(shifted.adjoint());
    out.left = svd.matrixV().col(n - 1);
  }
  const double scale = std::max(spectral_norm(m), 1e-300);
  const double res_r = (m * out.right - out.value * out.right).norm();
  const double res_l = (out.left.adjoint() * m - out.value * out.left.adjoint()).norm();
  if (res_r > 1e-9 * scale || res_l > 1e-9 * scale) {
    throw Error(ErrorCode::NoConvergence,
                "dominant eigenpair residual " + std::to_string(std::max(res_r, res_l)));
  }
  return out;
}

CVector solve_linear(const CMatrix& a, const CVector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "solve_linear shape mismatch");
  }
  if (a.rows() == 0) return CVector(0);
  Eigen::FullPivLU<CMatrix> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw Error(ErrorCode::Singular, "matrix is rank deficient (pivot threshold 1e-12)");
  CVector x = lu.solve(b);
  const double res = (a * x - b).norm();
  if (res > 1e-9 * (spectral_norm(a) * x.norm() + b.norm()) + 1e-300) {
    throw Error(ErrorCode::Singular, "residual " + std::to_string(res) + " exceeds bound");
  }
  return x;
}

Subspace orthonormal_complement(const Subspace& s) {
  const Index n = s.ambient_dim();
  if (s.dim() == 0) return Subspace::full(n);
  if (s.dim() == n) return Subspace(n);
  const auto svd = full_svd(s.basis());
  return Subspace::from_orthonormal(svd.matrixU().rightCols(n - s.dim()));
}

CMatrix kernel(const CMatrix& m, double rel_tol, double* gap) {
  const Index n = m.cols();
  if (n == 0) {
    if (gap) *gap = std::numeric_limits<double>::infinity();
    return CMatrix(0, 0);
  }
  // Padded to square: V is always full.
  CMatrix a = m;
  if (a.rows() < n) {
    a.conservativeResize(n, n);
    a.bottomRows(n - m.rows()).setZero();
  }
  const auto svd = full_svd(a);
  const RVector& sv = svd.singularValues();
  const double thr = rel_tol * std::max(1.0, sv(0));
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > thr) ++rank;
  if (gap) *gap = rank > 0 ? sv(rank - 1) : std::numeric_limits<double>::infinity();
  return svd.matrixV().rightCols(n - rank);
}

Subspace subspace_sum(const Subspace& a, const Subspace& b) {
  CMatrix both(a.ambient_dim(), a.dim() + b.dim());
  both << a.basis(), b.basis();
  return Subspace::span(both);
}

Subspace intersection(const Subspace& a, const Subspace& b, double tol) {
  const Index n = a.ambient_dim();
  if (a.empty() || b.empty()) return Subspace(n);
  // v = A x lies in b iff |P_b A x| = |x|: eigenvectors of A* P_b A at 1.
  const CMatrix g = a.basis().adjoint() * b.projector() * a.basis();
  const HermitianEigen eig = eig_hermitian(hermitian_part(g));
  Index k = 0;
  while (k < eig.values.size() && eig.values(k) > 1.0 - tol) ++k;
  if (k == 0) return Subspace(n);
  return Subspace::span(a.basis() * eig.vectors.leftCols(k));
}

Subspace image(const CMatrix& map, const Subspace& s, double rel_tol) {
  if (s.empty()) return Subspace(map.rows());
  const CMatrix v = map * s.basis();
  // Absolute floor so a map that kills the subspace gives the zero space.
  if (v.norm() <= 1e-12 * std::max(1.0, map.norm())) return Subspace(map.rows());
  return Subspace::span(v, rel_tol);
}

double subspace_distance(const Subspace& a, const Subspace& b) {
  return spectral_norm(a.projector() - b.projector());
}

bool contains(const Subspace& outer, const Subspace& inner, double tol) {
  if (inner.empty()) return true;
  const CMatrix residual = inner.basis() - outer.projector() * inner.basis();
  return spectral_norm(residual) <= tol;
}

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unvec(const CVector& v, Index rows) {
  const Index cols = rows ? v.size() / rows : 0;
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

}  // namespace oqrw
