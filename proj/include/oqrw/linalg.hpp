#pragma once

// Dense complex linear algebra for small local dimensions (h <= ~16, so
// superoperators up to 256 x 256). Thin layer over Eigen that fixes the
// tolerance conventions used throughout the library.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "oqrw/error.hpp"

namespace oqrw {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kTolOrtho = 1e-10;
inline constexpr double kTolRank = 1e-10;

// Orthonormal basis of a subspace of C^n, stored as the columns of a matrix.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(Index ambient_dim) : ambient_(ambient_dim), basis_(ambient_dim, 0) {}

  // Takes ownership of an already orthonormal basis; throws if the Gram
  // matrix deviates from the identity by more than kTolOrtho.
  static Subspace from_orthonormal(CMatrix basis);
  // Column span of arbitrary vectors (rank decided relative to the largest
  // singular value).
  static Subspace span(const CMatrix& vectors, double rel_tol = kTolRank);
  static Subspace full(Index ambient_dim);
  static Subspace coordinates(Index ambient_dim, const std::vector<Index>& indices);

  Index ambient_dim() const { return ambient_; }
  Index dim() const { return basis_.cols(); }
  bool empty() const { return basis_.cols() == 0; }
  const CMatrix& basis() const { return basis_; }
  CMatrix projector() const { return basis_ * basis_.adjoint(); }

 private:
  Index ambient_ = 0;
  CMatrix basis_;
};

struct Projector {
  CMatrix matrix;
  Subspace subspace;
};

struct HermitianEigen {
  RVector values;   // descending
  CMatrix vectors;  // column k belongs to values(k)
};

struct DominantEigen {
  Complex value;
  CVector right;
  CVector left;  // left.adjoint() * m == value * left.adjoint()
};

double hermitian_deviation(const CMatrix& h);
CMatrix hermitian_part(const CMatrix& m);

Projector support_projection(const CMatrix& h, double tol = 1e-10);
HermitianEigen eig_hermitian(const CMatrix& h);

// Eigenvalue of maximum modulus. Ties in modulus (relative 1e-9) are broken
// by largest real part, then smallest |imaginary part|.
DominantEigen eig_dominant(const CMatrix& m);

CVector solve_linear(const CMatrix& a, const CVector& b);

Subspace orthonormal_complement(const Subspace& s);

// Orthonormal basis of ker(m). Singular values at or below
// rel_tol * max(1, sigma_max) count as zero. If gap is non-null it receives
// the smallest singular value that was *not* counted as zero (or +inf).
CMatrix kernel(const CMatrix& m, double rel_tol = 1e-9, double* gap = nullptr);

Subspace subspace_sum(const Subspace& a, const Subspace& b);
Subspace intersection(const Subspace& a, const Subspace& b, double tol = 1e-8);
// Image of a subspace under a linear map (e.g. a projection).
Subspace image(const CMatrix& map, const Subspace& s, double rel_tol = kTolRank);
// Operator-norm distance between the orthogonal projectors, i.e. the sine of
// the largest principal angle when dimensions agree.
double subspace_distance(const Subspace& a, const Subspace& b);
bool contains(const Subspace& outer, const Subspace& inner, double tol = 1e-8);

double spectral_norm(const CMatrix& m);

// Column-major vectorization and its inverse.
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Index rows);

}  // namespace oqrw
