#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "oqrw/asymptotics.hpp"
#include "support.hpp"

using namespace oqrw;
using Catch::Approx;

namespace {

// Cramer rate of a +-1 walk stepping right with probability p.
double bernoulli_rate(double x, double p) {
  const double q = 1.0 - p;
  auto term = [](double w, double r) { return w <= 0.0 ? 0.0 : w * std::log(w / r); };
  return term((1 + x) / 2, p) + term((1 - x) / 2, q);
}

double golden_min(const std::function<double(double)>& f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-14; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

// Primal rate for moves (+e1, -e1, +e2, -e2) with probabilities p: minimum
// relative entropy over step frequencies with mean x, a one-parameter family.
double multinomial_rate_2d(const RVector& x, const std::array<double, 4>& p) {
  auto kl = [&](double t) {
    const std::array<double, 4> q{(t + x(0)) / 2, (t - x(0)) / 2, (1 - t + x(1)) / 2, (1 - t - x(1)) / 2};
    double s = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (q[static_cast<std::size_t>(j)] > 0) s += q[static_cast<std::size_t>(j)] * std::log(q[static_cast<std::size_t>(j)] / p[static_cast<std::size_t>(j)]);
    }
    return s;
  };
  return golden_min(kl, std::abs(x(0)), 1.0 - std::abs(x(1)));
}

WalkModel commuting_2d() {
  const double z = std::sqrt(0.2);
  return testing::commuting(testing::lattice_moves(2),
                            {{std::sqrt(0.4), std::sqrt(0.1), std::sqrt(0.3), z},
                             {std::sqrt(0.1), Complex(0, std::sqrt(0.2)), std::sqrt(0.25), std::sqrt(0.45)}});
}

}  // namespace

TEST_CASE("block parameters of the four-level family") {
  for (double p3 : {1.0 / 6, 0.5, 0.3}) {
    const double rest = (0.5 - p3) / 2;
    const WalkModel m = testing::four_level(rest, rest, p3);
    const SpaceDecomposition dec = decompose(m);
    const GaussianComponent g0 = block_parameters(m, dec.blocks[0]);
    const GaussianComponent g1 = block_parameters(m, dec.blocks[1]);
    CHECK(std::abs(g0.mean_rate(0)) < 1e-8);
    CHECK(g0.covariance(0, 0) == Approx(1.0).margin(1e-8));
    CHECK(g1.mean_rate(0) == Approx(-1.0 / 3).margin(1e-8));
    CHECK(g1.covariance(0, 0) == Approx(8.0 / 9).margin(1e-8));
  }
}

TEST_CASE("two-level walk drift 1/3 and variance 8/9") {
  const WalkModel m = testing::two_level();
  const SpaceDecomposition dec = decompose(m);
  const GaussianComponent g = block_parameters(m, dec.blocks[0]);
  CHECK(g.mean_rate(0) == Approx(1.0 / 3).margin(1e-8));
  CHECK(g.covariance(0, 0) == Approx(8.0 / 9).margin(1e-8));
}

TEST_CASE("commuting walk in two dimensions: multinomial mean and covariance") {
  const WalkModel m = commuting_2d();
  const SpaceDecomposition dec = decompose(m);
  REQUIRE(dec.blocks.size() == 2);
  const std::array<std::array<double, 4>, 2> probs{{{0.4, 0.1, 0.3, 0.2}, {0.1, 0.2, 0.25, 0.45}}};
  for (const auto& block : dec.blocks) {
    // Identify the block by its basis vector.
    const std::size_t row = std::abs(block.subspace.basis()(0, 0)) > 0.5 ? 0 : 1;
    const auto& p = probs[row];
    RVector mean(2);
    mean << p[0] - p[1], p[2] - p[3];
    RMatrix second = RMatrix::Zero(2, 2);
    second(0, 0) = p[0] + p[1];
    second(1, 1) = p[2] + p[3];
    const RMatrix cov = second - mean * mean.transpose();
    const GaussianComponent g = block_parameters(m, block);
    CHECK((g.mean_rate - mean).norm() < 1e-10);
    CHECK((g.covariance - cov).norm() < 1e-8);
  }
}

TEST_CASE("analytic lambda derivatives match finite differences") {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 8; ++trial) {
    const Index h = 2 + trial % 3;
    const int d = 1 + trial % 2;
    const WalkModel m = testing::random_model(h, d, rng);
    RVector dir(d);
    for (int k = 0; k < d; ++k) dir(k) = g(rng);
    const ChannelView view(m);
    const LambdaDerivatives ld = lambda_derivatives(view, dir);
    auto lam = [&](double t) { return spectral_radius(ChannelView(m, Subspace::full(h), t * dir)); };
    const double e = 1e-4;
    const double fd1 = (lam(e) - lam(-e)) / (2 * e);
    const double fd2 = (lam(e) - 2 * lam(0) + lam(-e)) / (e * e);
    CHECK(ld.first == Approx(fd1).margin(1e-6));
    CHECK(ld.second == Approx(fd2).margin(1e-5));
  }
}

TEST_CASE("Poisson solution satisfies its equation with zero trace") {
  std::mt19937_64 rng(202);
  const WalkModel m = testing::random_model(3, 1, rng);
  const ChannelView view(m);
  const RVector dir = RVector::Constant(1, 0.8);
  const CMatrix eta = poisson_solve(view, dir);
  const CMatrix tau = perron(view).tau;
  std::vector<double> c(2);
  for (Index i = 0; i < 2; ++i) c[static_cast<std::size_t>(i)] = 0.8 * view.shifts()(i, 0);
  const CMatrix first = view.apply_weighted(c, tau);
  const CMatrix residual = eta - apply(view, eta) - (first - first.trace() * tau);
  CHECK(residual.norm() < 1e-9);
  CHECK(std::abs(eta.trace()) < 1e-10);
}

TEST_CASE("Poisson solve refuses a reducible restriction") {
  const WalkModel m = testing::four_level(0.1, 0.2, 0.2);
  const ChannelView view(m, Subspace::coordinates(4, {1, 2}));
  try {
    poisson_solve(view, RVector::Ones(1));
    FAIL("expected NotIrreducible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotIrreducible);
  }
}

TEST_CASE("Gaussian mixture for the recurrent mixed state") {
  const WalkModel m = testing::four_level(0.0, 0.0, 0.5);
  const SpaceDecomposition dec = decompose(m);
  CMatrix rho0 = CMatrix::Zero(4, 4);
  rho0(1, 1) = rho0(2, 2) = rho0(3, 3) = 1.0 / 3;
  const MixtureModel mix = clt_mixture(m, dec, testing::at_origin(rho0), 600);
  REQUIRE(mix.components.size() == 2);
  CHECK(mix.components[0].weight == Approx(2.0 / 3).margin(1e-9));
  CHECK(mix.components[1].weight == Approx(1.0 / 3).margin(1e-9));
  CHECK(mix.mean_at_horizon(1)(0) == Approx(-std::sqrt(600.0) / 3).margin(1e-7));
  CHECK(mix.components[1].gaussian.covariance(0, 0) == Approx(8.0 / 9).margin(1e-8));
  const auto limit = empirical_mean_limit(mix);
  CHECK(limit[1].second(0) == Approx(-1.0 / 3).margin(1e-8));

  const MixtureModel single = clt_mixture(m, dec, testing::at_origin(testing::ketbra(4, 3)), 50);
  REQUIRE(single.components.size() == 1);
  CHECK(single.components[0].block_id == 1);
}

TEST_CASE("mixture weights sum to one for random initial states") {
  std::mt19937_64 rng(303);
  const WalkModel m = testing::four_level(0.1, 0.2, 0.2);
  const SpaceDecomposition dec = decompose(m);
  for (int i = 0; i < 5; ++i) {
    const MixtureModel mix = clt_mixture(m, dec, testing::at_origin(testing::random_density(4, rng)), 10);
    double s = 0;
    for (const auto& c : mix.components) s += c.weight;
    CHECK(s == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("Legendre transform matches the Bernoulli closed form") {
  const double a = std::sqrt(0.7), b = std::sqrt(0.3);
  const WalkModel m = testing::commuting(testing::lattice_moves(1), {{a, b}, {a, b}, {Complex(0, 0.5), std::sqrt(0.75)}});
  const SpaceDecomposition dec = decompose(m);
  for (const auto& block : dec.blocks) {
    const double p = block.subspace.dim() == 2 ? 0.7 : 0.25;
    for (int i = 0; i < 50; ++i) {
      const double x = -0.95 + 1.9 * i / 49.0;
      const RateEvaluation r = legendre(m, block.minimal_enclosures.front(), RVector::Constant(1, x));
      CHECK(r.value == Approx(bernoulli_rate(x, p)).margin(1e-6));
      CHECK_FALSE(r.boundary_hit);
    }
  }
}

TEST_CASE("Legendre transform in two dimensions matches the primal entropy oracle") {
  const WalkModel m = commuting_2d();
  const SpaceDecomposition dec = decompose(m);
  const std::array<std::array<double, 4>, 2> probs{{{0.4, 0.1, 0.3, 0.2}, {0.1, 0.2, 0.25, 0.45}}};
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (const auto& block : dec.blocks) {
    const std::size_t row = std::abs(block.subspace.basis()(0, 0)) > 0.5 ? 0 : 1;
    int checked = 0;
    while (checked < 15) {
      RVector x(2);
      x << unif(rng), unif(rng);
      if (std::abs(x(0)) + std::abs(x(1)) > 0.85) continue;  // stay inside the diamond
      const RateEvaluation r = legendre(m, block.subspace, x);
      CHECK(r.value == Approx(multinomial_rate_2d(x, probs[row])).margin(1e-6));
      ++checked;
    }
  }
}

TEST_CASE("rate is infinite outside the step range") {
  const WalkModel m = testing::two_level();
  const SpaceDecomposition dec = decompose(m);
  const RateEvaluation r = legendre(m, dec.blocks[0].subspace, RVector::Constant(1, 1.4));
  CHECK(r.boundary_hit);
  CHECK(r.value == RateEvaluation::kInfinity);
}

TEST_CASE("rate function vanishes at every contributing mean") {
  const double a = std::sqrt(0.7), b = std::sqrt(0.3);
  const WalkModel m = testing::commuting(testing::lattice_moves(1), {{a, b}, {a, b}, {Complex(0, 0.5), std::sqrt(0.75)}});
  const SpaceDecomposition dec = decompose(m);
  const DiagonalState rho = testing::at_origin(CMatrix::Identity(3, 3) / 3.0);
  for (double mean : {0.4, -0.5}) {
    const RateEvaluation r = rate_function(m, dec, rho, RVector::Constant(1, mean));
    CHECK(std::abs(r.value) < 1e-8);
    CHECK(r.label == "exact-LDP");
  }
  // Only the first block contributes for a state inside it.
  const RateEvaluation only = rate_function(m, dec, testing::at_origin(testing::ketbra(3, 0)), RVector::Constant(1, -0.5));
  CHECK(only.value == Approx(bernoulli_rate(-0.5, 0.7)).margin(1e-6));
}

TEST_CASE("transient part yields a bounds-only record") {
  const WalkModel m = testing::four_level(1.0 / 6, 1.0 / 6, 1.0 / 6);
  const SpaceDecomposition dec = decompose(m);
  const RateEvaluation r = rate_function(m, dec, testing::at_origin(testing::ketbra(4, 0)), RVector::Constant(1, 0.2));
  CHECK(r.label == "bounds-only");
  CHECK_FALSE(r.caveat.empty());
  CHECK(r.per_block.size() == 3);
  const RateEvaluation at_mean =
      rate_function(m, dec, testing::at_origin(testing::ketbra(4, 0)), RVector::Constant(1, -1.0 / 3));
  CHECK(std::abs(at_mean.value) < 1e-8);
}

TEST_CASE("lambda split on the four-level walk") {
  const WalkModel m = testing::four_level(1.0 / 6, 1.0 / 6, 1.0 / 6);
  const SpaceDecomposition dec = decompose(m);
  const DiagonalState rho = testing::at_origin(testing::ketbra(4, 0));
  for (int i = 0; i < 10; ++i) {
    const double u = -2.0 + 4.0 * i / 9.0;
    const LambdaSplit s = lambda_split_check(m, dec, Subspace::coordinates(4, {3}), rho, RVector::Constant(1, u));
    CHECK(s.transient == Approx(std::exp(-u) / 8 + 3 * std::exp(u) / 8).epsilon(1e-10));
    CHECK(s.enclosure == Approx(2 * std::exp(-u) / 3 + std::exp(u) / 3).epsilon(1e-10));
    CHECK(s.reachable == Approx(std::max(s.enclosure, s.transient)).epsilon(1e-8));
  }
}

TEST_CASE("gradient of log lambda against finite differences") {
  std::mt19937_64 rng(505);
  const WalkModel m = testing::random_model(3, 2, rng);
  RVector u(2);
  u << 0.7, -1.1;
  const RVector g = grad_log_lambda(m, Subspace::full(3), u);
  const double e = 1e-5;
  for (int k = 0; k < 2; ++k) {
    const RVector du = RVector::Unit(2, k) * e;
    const double fd = (log_lambda(m, Subspace::full(3), u + du) - log_lambda(m, Subspace::full(3), u - du)) / (2 * e);
    CHECK(g(k) == Approx(fd).margin(1e-7));
  }
}
