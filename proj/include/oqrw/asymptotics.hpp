#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "oqrw/structure.hpp"

namespace oqrw {

struct GaussianComponent {
  RVector mean_rate;  // m
  RMatrix covariance; // D
};

struct MixtureComponent {
  double weight = 0.0;
  std::size_t block_id = 0;
  GaussianComponent gaussian;
};

// Law of (X_n - X_0)/sqrt(n) predicted at horizon n: sum_a w_a N(sqrt(n) m_a, D_a).
struct MixtureModel {
  std::vector<MixtureComponent> components;
  long horizon = 1;

  RVector mean_at_horizon(std::size_t k) const;
};

struct RateEvaluation {
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  RVector point;
  double value = 0.0;
  RVector maximizer;
  bool boundary_hit = false;  // |u*| reached the search radius: rate possibly infinite
  std::size_t block_id = 0;   // block (or enclosure) attaining the minimum
  std::vector<double> per_block;
  std::string label;          // "exact-LDP", "bounds-only" or "single"
  // Bounds-only records: rate for the lower bound (valid on exposed points only).
  double lower_bound_value = 0.0;
  std::string caveat;
};

inline constexpr double kLegendreRadius = 20.0;

// m = sum_i Tr(L_i tau L_i^*) s_i for the invariant state of an enclosure.
RVector drift(const WalkModel& model, const Subspace& enclosure, const CMatrix& tau);
RVector drift(const WalkModel& model, const Subspace& enclosure);

// Zero-trace solution of (Id - L_V)(eta) = L'_u(tau) - Tr(L'_u(tau)) tau on
// an irreducible enclosure view (u = 0); eta is in the view's basis.
CMatrix poisson_solve(const ChannelView& restricted, const RVector& direction);

struct LambdaDerivatives {
  double first = 0.0;
  double second = 0.0;
};
LambdaDerivatives lambda_derivatives(const ChannelView& restricted, const RVector& direction);

// Covariance by polarization of u -> lambda''_u - (lambda'_u)^2.
RMatrix diffusion(const WalkModel& model, const Subspace& enclosure);

GaussianComponent block_parameters(const WalkModel& model, const Block& block);

MixtureModel clt_mixture(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState& rho,
                         long horizon);

// Dirac mixture sum_a w_a delta_{m_a}, the limit law of (X_n - X_0)/n.
std::vector<std::pair<double, RVector>> empirical_mean_limit(const MixtureModel& mixture);

double log_lambda(const WalkModel& model, const Subspace& subspace, const RVector& u);
// Gradient of u -> log lambda_u from the left/right Perron vectors, with a
// finite-difference fallback where the Perron data is not positive.
RVector grad_log_lambda(const WalkModel& model, const Subspace& subspace, const RVector& u);

RateEvaluation legendre(const WalkModel& model, const Subspace& subspace, const RVector& x);

RateEvaluation rate_function(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState& rho,
                             const RVector& x);

struct LambdaSplit {
  double reachable = 0.0;  // on Q = p~_V E(rho)
  double enclosure = 0.0;  // on V
  double transient = 0.0;  // on W = Q cap T
};

LambdaSplit lambda_split_check(const WalkModel& model, const SpaceDecomposition& dec, const Subspace& enclosure,
                               const DiagonalState& rho, const RVector& u);

}  // namespace oqrw
