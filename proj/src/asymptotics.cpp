#include "oqrw/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oqrw {

RVector MixtureModel::mean_at_horizon(std::size_t k) const {
  return std::sqrt(static_cast<double>(horizon)) * components[k].gaussian.mean_rate;
}

RVector drift(const WalkModel& model, const Subspace& enclosure, const CMatrix& tau) {
  const ChannelView view(model, enclosure);
  RVector m = RVector::Zero(model.lattice_dim);
  for (Index i = 0; i < view.branches(); ++i) {
    const CMatrix& k = view.compressed_kraus()[static_cast<std::size_t>(i)];
    m += (k * tau * k.adjoint()).trace().real() * view.shifts().row(i).transpose();
  }
  return m;
}

RVector drift(const WalkModel& model, const Subspace& enclosure) {
  return drift(model, enclosure, perron(ChannelView(model, enclosure)).tau);
}

namespace {

std::vector<double> directional_coefficients(const ChannelView& view, const RVector& direction, int power) {
  std::vector<double> c(static_cast<std::size_t>(view.branches()));
  for (Index i = 0; i < view.branches(); ++i) {
    const double us = direction.dot(view.shifts().row(i).transpose());
    c[static_cast<std::size_t>(i)] = std::pow(us, power) * view.weights()[static_cast<std::size_t>(i)];
  }
  return c;
}

void require_undeformed(const ChannelView& view) {
  if (view.deformation().size() && view.deformation().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::DimensionMismatch, "expected an undeformed view");
  }
}

}  // namespace

CMatrix poisson_solve(const ChannelView& restricted, const RVector& direction) {
  require_undeformed(restricted);
  const Index k = restricted.dim();
  const Index kk = k * k;
  const CMatrix m = to_matrix(restricted).matrix;
  double gap = 0.0;
  const CMatrix fixed = kernel(m - CMatrix::Identity(kk, kk), 1e-9, &gap);
  if (fixed.cols() != 1) {
    throw Error(ErrorCode::NotIrreducible, "restricted channel has a " + std::to_string(fixed.cols()) +
                                              "-dimensional fixed space");
  }
  const CMatrix tau = perron(restricted).tau;
  const CMatrix first = restricted.apply_weighted(directional_coefficients(restricted, direction, 1), tau);
  const CMatrix rhs = first - first.trace() * tau;

  // Bordered system: the trace constraint replaces the missing rank.
  CMatrix bordered = CMatrix::Zero(kk + 1, kk + 1);
  bordered.topLeftCorner(kk, kk) = CMatrix::Identity(kk, kk) - m;
  bordered.topRightCorner(kk, 1) = vec(tau);
  for (Index i = 0; i < k; ++i) bordered(kk, i * k + i) = 1.0;
  CVector b = CVector::Zero(kk + 1);
  b.head(kk) = vec(rhs);
  const CVector sol = solve_linear(bordered, b);
  return unvec(sol.head(kk), k);
}

LambdaDerivatives lambda_derivatives(const ChannelView& restricted, const RVector& direction) {
  require_undeformed(restricted);
  const CMatrix tau = perron(restricted).tau;
  const CMatrix eta = poisson_solve(restricted, direction);
  const auto c1 = directional_coefficients(restricted, direction, 1);
  const auto c2 = directional_coefficients(restricted, direction, 2);
  LambdaDerivatives d;
  d.first = restricted.apply_weighted(c1, tau).trace().real();
  d.second = restricted.apply_weighted(c2, tau).trace().real() + 2.0 * restricted.apply_weighted(c1, eta).trace().real();
  return d;
}

RMatrix diffusion(const WalkModel& model, const Subspace& enclosure) {
  const ChannelView view(model, enclosure);
  const int d = model.lattice_dim;
  auto quad = [&](const RVector& u) {
    const LambdaDerivatives ld = lambda_derivatives(view, u);
    return ld.second - ld.first * ld.first;
  };
  RMatrix cov = RMatrix::Zero(d, d);
  RVector diag(d);
  for (int i = 0; i < d; ++i) diag(i) = cov(i, i) = quad(RVector::Unit(d, i));
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double q = quad(RVector::Unit(d, i) + RVector::Unit(d, j));
      cov(i, j) = cov(j, i) = 0.5 * (q - diag(i) - diag(j));
    }
  }
  return cov;
}

GaussianComponent block_parameters(const WalkModel& model, const Block& block) {
  const Subspace& v = block.minimal_enclosures.front();
  return {drift(model, v, block.invariant_state()), diffusion(model, v)};
}

MixtureModel clt_mixture(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState& rho,
                         long horizon) {
  const AbsorptionWeights w = weights(model, dec, rho);
  MixtureModel mix;
  mix.horizon = horizon;
  for (std::size_t a = 0; a < dec.blocks.size(); ++a) {
    if (w.block[a] <= 1e-12) continue;
    mix.components.push_back({w.block[a], a, block_parameters(model, dec.blocks[a])});
  }
  return mix;
}

std::vector<std::pair<double, RVector>> empirical_mean_limit(const MixtureModel& mixture) {
  std::vector<std::pair<double, RVector>> out;
  for (const auto& c : mixture.components) out.emplace_back(c.weight, c.gaussian.mean_rate);
  return out;
}

double log_lambda(const WalkModel& model, const Subspace& subspace, const RVector& u) {
  return std::log(spectral_radius(ChannelView(model, subspace, u)));
}

RVector grad_log_lambda(const WalkModel& model, const Subspace& subspace, const RVector& u) {
  const ChannelView view(model, subspace, u);
  const int d = model.lattice_dim;
  RVector g(d);
  try {
    const PerronData p = perron(view);
    const double norm = (p.w * p.tau).trace().real();
    if (!(norm > 1e-12) || !(p.lambda > 0.0)) throw Error(ErrorCode::NoConvergence, "degenerate Perron pair");
    for (int k = 0; k < d; ++k) {
      std::vector<double> c(static_cast<std::size_t>(view.branches()));
      for (Index i = 0; i < view.branches(); ++i) {
        c[static_cast<std::size_t>(i)] = view.shifts()(i, k) * view.weights()[static_cast<std::size_t>(i)];
      }
      g(k) = (p.w * view.apply_weighted(c, p.tau)).trace().real() / (norm * p.lambda);
    }
  } catch (const Error&) {
    constexpr double h = 1e-6;
    for (int k = 0; k < d; ++k) {
      const RVector e = RVector::Unit(d, k) * h;
      g(k) = (log_lambda(model, subspace, u + e) - log_lambda(model, subspace, u - e)) / (2 * h);
    }
  }
  return g;
}

namespace {

RVector project_to_ball(RVector u) {
  const double n = u.norm();
  if (n > kLegendreRadius) u *= kLegendreRadius / n;
  return u;
}

void grid_starts(int d, int axis, RVector& cur, std::vector<RVector>& out) {
  if (axis == d) {
    if (cur.norm() <= kLegendreRadius + 1e-12) out.push_back(cur);
    return;
  }
  for (double t = -kLegendreRadius; t <= kLegendreRadius + 1e-12; t += 5.0) {
    cur(axis) = t;
    grid_starts(d, axis + 1, cur, out);
  }
}

}  // namespace

RateEvaluation legendre(const WalkModel& model, const Subspace& subspace, const RVector& x) {
  const int d = model.lattice_dim;
  if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, "point has wrong dimension");
  auto objective = [&](const RVector& u) { return u.dot(x) - log_lambda(model, subspace, u); };

  std::vector<RVector> starts;
  RVector cur = RVector::Zero(d);
  grid_starts(d, 0, cur, starts);
  RVector u = RVector::Zero(d);
  double best = objective(u);
  for (const auto& s : starts) {
    const double v = objective(s);
    if (v > best) {
      best = v;
      u = s;
    }
  }

  // Damped Newton on the concave objective; Hessian by differencing the
  // analytic gradient.
  constexpr double fd = 1e-5;
  for (int iter = 0; iter < 200; ++iter) {
    const RVector grad = x - grad_log_lambda(model, subspace, u);
    if (grad.norm() < 1e-13) break;
    RMatrix hess(d, d);
    for (int k = 0; k < d; ++k) {
      const RVector e = RVector::Unit(d, k) * fd;
      hess.col(k) = (grad_log_lambda(model, subspace, u + e) - grad_log_lambda(model, subspace, u - e)) / (2 * fd);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(hess);
    const double shift = std::max(0.0, 1e-10 - es.eigenvalues().minCoeff());
    RVector step = (hess + shift * RMatrix::Identity(d, d)).ldlt().solve(grad);
    if (!step.allFinite()) step = grad;

    double t = 1.0;
    bool improved = false;
    RVector next = u;
    double next_val = best;
    for (int ls = 0; ls < 60; ++ls) {
      const RVector cand = project_to_ball(u + t * step);
      const double v = objective(cand);
      if (v >= best - 1e-15 * std::max(1.0, std::abs(best))) {
        next = cand;
        next_val = v;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
    const double moved = (next - u).norm();
    const double gain = next_val - best;
    u = next;
    best = std::max(best, next_val);
    if (moved < 1e-14 || (gain < 1e-16 && moved < 1e-9)) break;
  }

  RateEvaluation r;
  r.point = x;
  r.maximizer = u;
  r.value = std::max(best, objective(RVector::Zero(d)));
  r.boundary_hit = u.norm() >= kLegendreRadius - 1e-6;
  if (r.boundary_hit) {
    const RVector grad = x - grad_log_lambda(model, subspace, u);
    if (grad.dot(u / u.norm()) > 1e-6) r.value = RateEvaluation::kInfinity;
  }
  r.value = std::max(r.value, 0.0);
  r.lower_bound_value = r.value;
  r.label = "single";
  r.per_block = {r.value};
  return r;
}

RateEvaluation rate_function(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState& rho,
                             const RVector& x) {
  const AbsorptionWeights w = weights(model, dec, rho);
  RateEvaluation best;
  best.point = x;
  best.value = RateEvaluation::kInfinity;
  best.maximizer = RVector::Zero(model.lattice_dim);
  bool found = false;

  auto consider = [&](const RateEvaluation& e, std::size_t id) {
    best.per_block.push_back(e.value);
    if (!found || e.value < best.value) {
      best.value = e.value;
      best.maximizer = e.maximizer;
      best.boundary_hit = e.boundary_hit;
      best.block_id = id;
      found = true;
    }
  };

  if (dec.transient.empty()) {
    best.label = "exact-LDP";
    for (std::size_t a = 0; a < dec.blocks.size(); ++a) {
      if (w.block[a] <= 1e-12) continue;
      consider(legendre(model, dec.blocks[a].minimal_enclosures.front(), x), a);
    }
    best.lower_bound_value = best.value;
    return best;
  }

  // Transient part present: upper/lower bound rates over Q_{a,b} = p~_V E(rho).
  best.label = "bounds-only";
  best.caveat =
      "lower bound holds on exposed points of the rate when lambda_u is not smooth; exposed-point set not computed";
  const Subspace reach = reachable_space(model, rho);
  for (std::size_t a = 0; a < dec.blocks.size(); ++a) {
    for (std::size_t b = 0; b < dec.blocks[a].minimal_enclosures.size(); ++b) {
      if (w.enclosure[a][b] <= 1e-12) continue;
      const AbsorptionOperator abs = absorption(model, dec, dec.blocks[a].minimal_enclosures[b]);
      const Subspace q = absorbed_reachable_space(abs, reach);
      consider(legendre(model, q, x), a);
    }
  }
  best.lower_bound_value = best.value;
  return best;
}

LambdaSplit lambda_split_check(const WalkModel& model, const SpaceDecomposition& dec, const Subspace& enclosure,
                               const DiagonalState& rho, const RVector& u) {
  const AbsorptionOperator abs = absorption(model, dec, enclosure);
  const double a = (abs.matrix * rho.local_marginal(model.local_dim())).trace().real();
  if (a <= 1e-12) throw Error(ErrorCode::InvalidState, "state is not absorbed in the enclosure");
  const Subspace q = absorbed_reachable_space(abs, reachable_space(model, rho));
  const Subspace w = intersection(q, dec.transient);

  LambdaSplit out;
  out.reachable = spectral_radius(ChannelView(model, q, u));
  out.enclosure = spectral_radius(ChannelView(model, enclosure, u));
  out.transient = w.empty() ? 0.0 : spectral_radius(ChannelView(model, w, u));
  const double expected = std::max(out.enclosure, out.transient);
  if (std::abs(out.reachable - expected) > 1e-8 * std::max(1.0, out.reachable)) {
    throw Error(ErrorCode::AssertionFailure, "lambda split violated: " + std::to_string(out.reachable) + " vs " +
                                                 std::to_string(expected));
  }
  return out;
}

}  // namespace oqrw
