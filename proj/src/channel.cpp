#include "oqrw/channel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace oqrw {

double trace_preservation_deviation(const WalkModel& model) {
  const Index h = model.local_dim();
  CMatrix sum = CMatrix::Zero(h, h);
  for (const auto& k : model.kraus) sum += k.adjoint() * k;
  return (sum - CMatrix::Identity(h, h)).norm();
}

void validate(const WalkModel& model) {
  if (model.lattice_dim < 1) throw Error(ErrorCode::InvalidModel, "lattice_dim must be positive");
  if (model.kraus.empty()) throw Error(ErrorCode::InvalidModel, "at least one Kraus operator is required");
  if (model.kraus.size() != model.shifts.size()) {
    throw Error(ErrorCode::InvalidModel, "kraus and shifts have different lengths");
  }
  const Index h = model.local_dim();
  if (h < 1) throw Error(ErrorCode::InvalidModel, "empty Kraus operator");
  bool any_nonzero = false;
  for (std::size_t i = 0; i < model.kraus.size(); ++i) {
    const auto& k = model.kraus[i];
    if (k.rows() != h || k.cols() != h) {
      throw Error(ErrorCode::InvalidModel, "kraus[" + std::to_string(i) + "] is not " + std::to_string(h) + "x" +
                                               std::to_string(h));
    }
    if (!k.allFinite()) throw Error(ErrorCode::InvalidModel, "kraus[" + std::to_string(i) + "] has non-finite entries");
    if (model.shifts[i].size() != model.lattice_dim) {
      throw Error(ErrorCode::InvalidModel, "shifts[" + std::to_string(i) + "] has wrong dimension");
    }
    any_nonzero = any_nonzero || model.shifts[i].any();
  }
  if (!any_nonzero) throw Error(ErrorCode::InvalidModel, "all shifts are zero");
  const double dev = trace_preservation_deviation(model);
  if (dev > kTolTracePreserving) {
    throw Error(ErrorCode::NotTracePreserving, "||sum L_i^* L_i - 1|| = " + std::to_string(dev));
  }
}

ChannelView::ChannelView(const WalkModel& model) : ChannelView(model, Subspace::full(model.local_dim())) {}

ChannelView::ChannelView(const WalkModel& model, Subspace domain, RVector deformation)
    : domain_(std::move(domain)), u_(std::move(deformation)), lattice_dim_(model.lattice_dim) {
  if (domain_.ambient_dim() != model.local_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "view domain does not live in the local space");
  }
  if (u_.size() == 0) u_ = RVector::Zero(model.lattice_dim);
  if (u_.size() != model.lattice_dim) throw Error(ErrorCode::DimensionMismatch, "deformation has wrong dimension");
  const CMatrix& b = domain_.basis();
  shifts_.resize(model.branches(), model.lattice_dim);
  kraus_.reserve(model.kraus.size());
  weights_.reserve(model.kraus.size());
  for (Index i = 0; i < model.branches(); ++i) {
    kraus_.push_back(b.adjoint() * model.kraus[static_cast<std::size_t>(i)] * b);
    shifts_.row(i) = model.shift(i).transpose();
    weights_.push_back(std::exp(u_.dot(model.shift(i))));
  }
}

ChannelView ChannelView::with_deformation(const RVector& u) const {
  if (u.size() != lattice_dim_) throw Error(ErrorCode::DimensionMismatch, "deformation has wrong dimension");
  ChannelView out = *this;
  out.u_ = u;
  for (Index i = 0; i < branches(); ++i) out.weights_[static_cast<std::size_t>(i)] = std::exp(u.dot(shifts_.row(i).transpose()));
  return out;
}

CMatrix ChannelView::apply_weighted(const std::vector<double>& coeff, const CMatrix& sigma) const {
  if (sigma.rows() != dim() || sigma.cols() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "operator is not on the view's domain");
  }
  CMatrix out = CMatrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < kraus_.size(); ++i) {
    if (coeff[i] == 0.0) continue;
    out += coeff[i] * (kraus_[i] * sigma * kraus_[i].adjoint());
  }
  return out;
}

CMatrix ChannelView::apply_dual_weighted(const std::vector<double>& coeff, const CMatrix& x) const {
  if (x.rows() != dim() || x.cols() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "operator is not on the view's domain");
  }
  CMatrix out = CMatrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < kraus_.size(); ++i) {
    if (coeff[i] == 0.0) continue;
    out += coeff[i] * (kraus_[i].adjoint() * x * kraus_[i]);
  }
  return out;
}

CMatrix apply(const ChannelView& view, const CMatrix& sigma) { return view.apply_weighted(view.weights(), sigma); }

CMatrix apply_dual(const ChannelView& view, const CMatrix& x) { return view.apply_dual_weighted(view.weights(), x); }

namespace {

// vec(K X K^*) = (conj(K) (x) K) vec(X) for column-major vec.
CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::optional<CMatrix> rotate_to_positive(const CMatrix& t) {
  const double norm = t.norm();
  if (!(norm > 0.0)) return std::nullopt;
  CMatrix x = t;
  const Complex tr = t.trace();
  if (std::abs(tr) > 1e-8 * norm) {
    x /= tr;
  } else {
    Index imax = 0;
    t.diagonal().cwiseAbs().maxCoeff(&imax);
    const Complex d = t(imax, imax);
    if (std::abs(d) < 1e-12 * norm) return std::nullopt;
    x /= d / std::abs(d);
  }
  if (hermitian_deviation(x) > 1e-7 * x.norm()) return std::nullopt;
  x = hermitian_part(x);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() < -1e-8 * top) return std::nullopt;
  return x;
}

// Positive eigenvector for `lambda` of a positive map given by matrix m.
// Falls back from the plain eigenvector to the spectral projector applied to
// the identity when the eigenvalue is degenerate.
std::optional<CMatrix> positive_eigenvector(const CMatrix& m, Complex lambda, const CVector& solver_vec, Index k) {
  const Index n = m.rows();
  const CMatrix shifted = m - lambda * CMatrix::Identity(n, n);
  const CMatrix ker = kernel(shifted, 1e-9);
  if (ker.cols() == 1) {
    if (auto t = rotate_to_positive(unvec(ker.col(0), k))) return t;
  } else if (ker.cols() > 1) {
    const CMatrix left = kernel(shifted.adjoint(), 1e-9);
    if (left.cols() == ker.cols()) {
      Eigen::FullPivLU<CMatrix> lu(left.adjoint() * ker);
      if (lu.isInvertible()) {
        const CVector id = vec(CMatrix::Identity(k, k));
        const CVector p = ker * lu.solve(left.adjoint() * id);
        if (auto t = rotate_to_positive(unvec(p, k))) return t;
      }
    }
  }
  return rotate_to_positive(unvec(solver_vec, k));
}

}  // namespace

SuperoperatorMatrix to_matrix(const ChannelView& view) {
  const Index k = view.dim();
  CMatrix m = CMatrix::Zero(k * k, k * k);
  for (std::size_t i = 0; i < view.compressed_kraus().size(); ++i) {
    const CMatrix& kr = view.compressed_kraus()[i];
    m += view.weights()[i] * kron(kr.conjugate(), kr);
  }
  return {m};
}

SuperoperatorMatrix to_dual_matrix(const ChannelView& view) {
  const Index k = view.dim();
  CMatrix m = CMatrix::Zero(k * k, k * k);
  for (std::size_t i = 0; i < view.compressed_kraus().size(); ++i) {
    const CMatrix& kr = view.compressed_kraus()[i];
    m += view.weights()[i] * kron(kr.transpose(), kr.adjoint());
  }
  return {m};
}

double spectral_radius(const ChannelView& view) {
  if (view.dim() == 0) return 0.0;
  const CMatrix m = to_matrix(view).matrix;
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "spectral radius eigensolve failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

PerronData perron(const ChannelView& view) {
  const Index k = view.dim();
  if (k == 0) throw Error(ErrorCode::DimensionMismatch, "perron on the zero subspace");
  const CMatrix m = to_matrix(view).matrix;
  const DominantEigen dom = eig_dominant(m);
  const double scale = std::max(1.0, std::abs(dom.value));
  if (std::abs(dom.value.imag()) > 1e-9 * scale || dom.value.real() < -1e-12 * scale) {
    throw Error(ErrorCode::NoConvergence, "dominant eigenvalue is not a nonnegative real");
  }
  PerronData out;
  out.lambda = std::max(0.0, dom.value.real());

  auto tau = positive_eigenvector(m, out.lambda, dom.right, k);
  if (!tau) throw Error(ErrorCode::NoConvergence, "Perron eigenvector is not positive after phase fixing");
  out.tau = *tau / tau->trace().real();

  const CMatrix md = to_dual_matrix(view).matrix;
  Eigen::ComplexEigenSolver<CMatrix> esd(md, true);
  Index jbest = 0;
  (esd.eigenvalues().array() - Complex(out.lambda, 0.0)).abs().minCoeff(&jbest);
  auto w = positive_eigenvector(md, out.lambda, esd.eigenvectors().col(jbest), k);
  if (!w) throw Error(ErrorCode::NoConvergence, "left Perron eigenvector is not positive");
  out.w = *w / w->norm();

  // Gap: lambda minus the largest modulus among the remaining eigenvalues.
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  std::vector<double> mods;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mods.begin(), mods.end(), std::greater<>());
  out.spectral_gap = mods.size() > 1 ? out.lambda - mods[1] : out.lambda;
  return out;
}

double enclosure_defect(const WalkModel& model, const Subspace& s) {
  const CMatrix p = s.projector();
  double worst = 0.0;
  for (const auto& l : model.kraus) worst = std::max(worst, spectral_norm(l * p - p * l * p));
  return worst;
}

}  // namespace oqrw
