#include "oqrw/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace oqrw {

CMatrix DiagonalState::local_marginal(Index h) const {
  CMatrix sum = CMatrix::Zero(h, h);
  for (const auto& e : entries) sum += e.matrix;
  return sum;
}

void validate(const DiagonalState& rho, const WalkModel& model) {
  if (rho.entries.empty()) throw Error(ErrorCode::InvalidState, "state has no entries");
  const Index h = model.local_dim();
  double total = 0.0;
  for (const auto& e : rho.entries) {
    if (e.site.size() != model.lattice_dim) throw Error(ErrorCode::InvalidState, "site has wrong lattice dimension");
    if (e.matrix.rows() != h || e.matrix.cols() != h) throw Error(ErrorCode::InvalidState, "rho(k) has wrong size");
    if (!e.matrix.allFinite()) throw Error(ErrorCode::InvalidState, "rho(k) has non-finite entries");
    if (hermitian_deviation(e.matrix) > 1e-10) throw Error(ErrorCode::InvalidState, "rho(k) is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(e.matrix), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) throw Error(ErrorCode::InvalidState, "rho(k) is not positive");
    total += e.matrix.trace().real();
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidState, "total trace is " + std::to_string(total) + ", expected 1");
  }
}

DiagonalState localized_state(const CMatrix& rho0, int lattice_dim) {
  DiagonalState s;
  s.entries.push_back({Eigen::VectorXi::Zero(lattice_dim), rho0});
  return s;
}

namespace {

// Real-linear Hermitian basis of the complex span of `ops`, assumed closed
// under adjoint (true for fixed spaces of Hermiticity-preserving maps).
std::vector<CMatrix> hermitian_basis(const CMatrix& kernel_vectors, Index k) {
  const Index n = kernel_vectors.cols();
  std::vector<CMatrix> out;
  if (n == 0) return out;
  const Index kk = k * k;
  RMatrix real(2 * kk, 2 * n);
  const Complex i_unit(0.0, 1.0);
  for (Index j = 0; j < n; ++j) {
    const CMatrix x = unvec(kernel_vectors.col(j), k);
    const CMatrix re = 0.5 * (x + x.adjoint());
    const CMatrix im = (x - x.adjoint()) / (2.0 * i_unit);
    const CVector vr = vec(re), vi = vec(im);
    real.col(2 * j) << vr.real(), vr.imag();
    real.col(2 * j + 1) << vi.real(), vi.imag();
  }
  Eigen::JacobiSVD<RMatrix> svd(real, Eigen::ComputeThinU);
  const RVector& sv = svd.singularValues();
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-8 * sv(0)) ++rank;
  for (Index j = 0; j < rank; ++j) {
    const RVector u = svd.matrixU().col(j);
    CVector c(kk);
    for (Index t = 0; t < kk; ++t) c(t) = Complex(u(t), u(kk + t));
    out.push_back(hermitian_part(unvec(c, k)));
  }
  return out;
}

CMatrix fixed_space(const CMatrix& m) {
  const Index n = m.rows();
  double gap = 0.0;
  const CMatrix ker = kernel(m - CMatrix::Identity(n, n), 1e-9, &gap);
  if (gap < 1e-7) {
    throw Error(ErrorCode::NumericalDegeneracy,
                "eigenvalue-1 eigenspace is numerically ambiguous (gap " + std::to_string(gap) + ")");
  }
  return ker;
}

Subspace embed(const Subspace& outer, const CMatrix& inner_vectors) {
  return Subspace::span(outer.basis() * inner_vectors);
}

std::size_t fixed_space_dim(const WalkModel& model, const Subspace& s) {
  const ChannelView view(model, s);
  return static_cast<std::size_t>(fixed_space(to_matrix(view).matrix).cols());
}

bool diagonal_greater(const Subspace& a, const Subspace& b) {
  const RVector da = a.projector().diagonal().real();
  const RVector db = b.projector().diagonal().real();
  for (Index i = 0; i < da.size(); ++i) {
    if (std::abs(da(i) - db(i)) > 1e-9) return da(i) > db(i);
  }
  return a.dim() > b.dim();
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Eigenspaces of a generic element of the fixed-point algebra of the dual
// channel on R, in R coordinates. Empty result means the draw was not
// generic enough.
std::vector<CMatrix> split_by_random_element(const std::vector<CMatrix>& algebra, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index r = algebra.front().rows();
  CMatrix x = CMatrix::Zero(r, r);
  for (const auto& a : algebra) x += normal(rng) * a;
  const HermitianEigen eig = eig_hermitian(hermitian_part(x));
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::vector<CMatrix> clusters;
  Index start = 0;
  for (Index i = 1; i <= r; ++i) {
    if (i == r || eig.values(i - 1) - eig.values(i) > 1e-6 * scale) {
      clusters.push_back(eig.vectors.middleCols(start, i - start));
      if (i < r && eig.values(i - 1) - eig.values(i) < 1e-4 * scale) return {};
      start = i;
    }
  }
  return clusters;
}

}  // namespace

std::vector<CMatrix> invariant_operators(const ChannelView& view) {
  if (view.deformation().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::DimensionMismatch, "invariant_operators needs an undeformed view");
  }
  return hermitian_basis(fixed_space(to_matrix(view).matrix), view.dim());
}

std::vector<CMatrix> harmonic_operators(const ChannelView& view) {
  if (view.deformation().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::DimensionMismatch, "harmonic_operators needs an undeformed view");
  }
  return hermitian_basis(fixed_space(to_dual_matrix(view).matrix), view.dim());
}

Subspace recurrent_space(const WalkModel& model) {
  const Index h = model.local_dim();
  const auto fixed = invariant_operators(ChannelView(model));
  CMatrix total = CMatrix::Zero(h, h);
  for (const auto& f : fixed) {
    const HermitianEigen e = eig_hermitian(f);
    total += e.vectors * e.values.cwiseAbs().asDiagonal() * e.vectors.adjoint();
  }
  return support_projection(hermitian_part(total), 1e-9).subspace;
}

SpaceDecomposition decompose(const WalkModel& model, std::uint64_t seed) {
  SpaceDecomposition dec;
  dec.recurrent = recurrent_space(model);
  dec.transient = orthonormal_complement(dec.recurrent);

  const ChannelView on_r(model, dec.recurrent);
  const auto algebra = harmonic_operators(on_r);

  std::vector<Subspace> minimal;
  std::vector<CMatrix> clusters;
  std::mt19937_64 rng(seed);
  constexpr int kAttempts = 5;
  for (int attempt = 0; attempt < kAttempts && minimal.empty(); ++attempt) {
    clusters = split_by_random_element(algebra, rng);
    if (clusters.empty()) continue;
    std::vector<Subspace> candidate;
    bool ok = true;
    for (const auto& c : clusters) {
      Subspace v = embed(dec.recurrent, c);
      if (enclosure_defect(model, v) > 1e-9 || fixed_space_dim(model, v) != 1) {
        ok = false;
        break;
      }
      candidate.push_back(std::move(v));
    }
    if (ok) minimal = std::move(candidate);
  }
  if (minimal.empty()) {
    throw Error(ErrorCode::NumericalDegeneracy, "could not split the recurrent space into minimal enclosures");
  }

  // Two minimal enclosures share a block iff the fixed-point algebra links
  // them through an off-diagonal block.
  UnionFind uf(clusters.size());
  for (std::size_t a = 0; a < clusters.size(); ++a) {
    for (std::size_t b = a + 1; b < clusters.size(); ++b) {
      for (const auto& x : algebra) {
        if ((clusters[a].adjoint() * x * clusters[b]).norm() > 1e-8) {
          uf.unite(a, b);
          break;
        }
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> group_of(clusters.size(), SIZE_MAX);
  for (std::size_t a = 0; a < clusters.size(); ++a) {
    const std::size_t root = uf.find(a);
    if (group_of[root] == SIZE_MAX) {
      group_of[root] = groups.size();
      groups.emplace_back();
    }
    groups[group_of[root]].push_back(a);
  }

  for (auto& members : groups) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return diagonal_greater(minimal[a], minimal[b]); });
    Block block;
    CMatrix basis(model.local_dim(), 0);
    for (std::size_t idx : members) {
      const Subspace& v = minimal[idx];
      CMatrix grown(basis.rows(), basis.cols() + v.dim());
      grown << basis, v.basis();
      basis = std::move(grown);
      block.minimal_enclosures.push_back(v);
      block.enclosure_states.push_back(perron(ChannelView(model, v)).tau);
    }
    block.subspace = Subspace::span(basis);
    dec.blocks.push_back(std::move(block));
  }
  std::sort(dec.blocks.begin(), dec.blocks.end(),
            [](const Block& a, const Block& b) { return diagonal_greater(a.subspace, b.subspace); });
  return dec;
}

namespace {

CMatrix absorption_on_transient(const WalkModel& model, const Subspace& transient, const Subspace& enclosure) {
  const CMatrix pv = enclosure.projector();
  if (transient.empty()) return pv;
  const ChannelView full(model);
  const ChannelView on_t(model, transient);
  const CMatrix& t = transient.basis();
  const CMatrix rhs = t.adjoint() * apply_dual(full, pv) * t;
  const Index k = transient.dim();
  const CMatrix system = CMatrix::Identity(k * k, k * k) - to_dual_matrix(on_t).matrix;
  const CVector b = solve_linear(system, vec(rhs));
  return pv + t * unvec(b, k) * t.adjoint();
}

// Spectral projector of L^* at eigenvalue 1 applied to p_V.
CMatrix absorption_by_projector(const WalkModel& model, const Subspace& enclosure) {
  const Index h = model.local_dim();
  const CMatrix md = to_dual_matrix(ChannelView(model)).matrix;
  const CMatrix shifted = md - CMatrix::Identity(h * h, h * h);
  const CMatrix right = kernel(shifted, 1e-9);
  const CMatrix left = kernel(shifted.adjoint(), 1e-9);
  if (right.cols() != left.cols() || right.cols() == 0) {
    throw Error(ErrorCode::SingularTransientSystem, "eigenvalue 1 of the dual channel is not semisimple");
  }
  Eigen::FullPivLU<CMatrix> lu(left.adjoint() * right);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularTransientSystem, "spectral projector is ill-conditioned");
  const CVector a = right * lu.solve(left.adjoint() * vec(enclosure.projector()));
  return unvec(a, h);
}

}  // namespace

AbsorptionOperator absorption(const WalkModel& model, const Subspace& enclosure) {
  const Subspace r = recurrent_space(model);
  SpaceDecomposition dec;
  dec.recurrent = r;
  dec.transient = orthonormal_complement(r);
  return absorption(model, dec, enclosure);
}

AbsorptionOperator absorption(const WalkModel& model, const SpaceDecomposition& dec, const Subspace& enclosure) {
  if (enclosure.ambient_dim() != model.local_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "enclosure does not live in the local space");
  }
  const double defect = enclosure_defect(model, enclosure);
  if (defect > 1e-9) throw Error(ErrorCode::NotAnEnclosure, "Kraus defect " + std::to_string(defect));

  CMatrix a;
  if (contains(dec.recurrent, enclosure, 1e-8)) {
    try {
      a = absorption_on_transient(model, dec.transient, enclosure);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Singular) throw;
      a = absorption_by_projector(model, enclosure);
    }
  } else {
    a = absorption_by_projector(model, enclosure);
  }
  a = hermitian_part(a);
  AbsorptionOperator out{enclosure, a, support_projection(a, 1e-9)};
  return out;
}

CMatrix absorption_by_iteration(const WalkModel& model, const Subspace& enclosure, int iterations) {
  const ChannelView full(model);
  CMatrix x = enclosure.projector();
  CMatrix mean = CMatrix::Zero(x.rows(), x.cols());
  const int first = iterations / 2;
  for (int n = 1; n <= iterations; ++n) {
    x = apply_dual(full, x);
    if (n >= first) mean += x;
  }
  return mean / static_cast<double>(iterations - first + 1);
}

Subspace reachable_space(const WalkModel& model, const DiagonalState& rho) {
  const Index h = model.local_dim();
  Subspace s = support_projection(hermitian_part(rho.local_marginal(h)), 1e-12).subspace;
  for (Index iter = 0; iter <= h; ++iter) {
    CMatrix grown(h, s.dim() * (model.branches() + 1));
    grown.leftCols(s.dim()) = s.basis();
    for (Index i = 0; i < model.branches(); ++i) {
      grown.middleCols(s.dim() * (i + 1), s.dim()) = model.kraus[static_cast<std::size_t>(i)] * s.basis();
    }
    Subspace next = Subspace::span(grown, 1e-10);
    if (next.dim() == s.dim()) return next;
    s = std::move(next);
  }
  return s;
}

Subspace absorbed_reachable_space(const AbsorptionOperator& a, const Subspace& reachable) {
  return image(a.support.matrix, reachable, 1e-10);
}

AbsorptionWeights weights(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState& rho) {
  const CMatrix marginal = rho.local_marginal(model.local_dim());
  AbsorptionWeights w;
  for (const auto& block : dec.blocks) {
    w.block.push_back((absorption(model, dec, block.subspace).matrix * marginal).trace().real());
    std::vector<double> inner;
    for (const auto& v : block.minimal_enclosures) {
      inner.push_back((absorption(model, dec, v).matrix * marginal).trace().real());
    }
    w.enclosure.push_back(std::move(inner));
  }
  return w;
}

}  // namespace oqrw
