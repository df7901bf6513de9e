#include <catch2/catch_amalgamated.hpp>

#include "oqrw/structure.hpp"
#include "support.hpp"

using namespace oqrw;
using Catch::Approx;

namespace {

ErrorCode state_error(const DiagonalState& rho, const WalkModel& m) {
  try {
    validate(rho, m);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("state unexpectedly valid");
  return ErrorCode::Io;
}

void check_four_level_structure(const SpaceDecomposition& dec, const WalkModel& m) {
  CHECK(subspace_distance(dec.transient, Subspace::coordinates(4, {0})) < 1e-8);
  CHECK(subspace_distance(dec.recurrent, Subspace::coordinates(4, {1, 2, 3})) < 1e-8);
  REQUIRE(dec.blocks.size() == 2);
  CHECK(subspace_distance(dec.blocks[0].subspace, Subspace::coordinates(4, {1, 2})) < 1e-8);
  CHECK(subspace_distance(dec.blocks[1].subspace, Subspace::coordinates(4, {3})) < 1e-8);
  CHECK(dec.blocks[0].multiplicity() == 2);
  CHECK(dec.blocks[1].multiplicity() == 1);
  // The split of span{e1,e2} is not unique: check its defining properties.
  const auto& v = dec.blocks[0].minimal_enclosures;
  CHECK(v[0].dim() == 1);
  CHECK(v[1].dim() == 1);
  CHECK((v[0].basis().adjoint() * v[1].basis()).norm() < 1e-8);
  CHECK(enclosure_defect(m, v[0]) < 1e-9);
  CHECK(enclosure_defect(m, v[1]) < 1e-9);
  CHECK(subspace_distance(subspace_sum(v[0], v[1]), dec.blocks[0].subspace) < 1e-8);
}

}  // namespace

TEST_CASE("four-level family decomposes into transient e0 and two blocks") {
  for (const auto& p : std::vector<std::array<double, 3>>{
           {1.0 / 6, 1.0 / 6, 1.0 / 6}, {0.1, 0.3, 0.1}, {0.05, 0.05, 0.4}, {0.2, 0.2, 0.1}}) {
    const WalkModel m = testing::four_level(p[0], p[1], p[2]);
    check_four_level_structure(decompose(m), m);
  }
}

TEST_CASE("four-level boundary member p1 = p2 = 0 keeps the same blocks") {
  const WalkModel m = testing::four_level(0.0, 0.0, 0.5);
  check_four_level_structure(decompose(m), m);
}

TEST_CASE("two-level walk has a one-dimensional block and transient e0") {
  const SpaceDecomposition dec = decompose(testing::two_level());
  CHECK(dec.transient.dim() == 1);
  REQUIRE(dec.blocks.size() == 1);
  CHECK(subspace_distance(dec.blocks[0].subspace, Subspace::coordinates(2, {1})) < 1e-8);
  CHECK((dec.blocks[0].invariant_state() - CMatrix::Identity(1, 1)).norm() < 1e-10);
}

TEST_CASE("commuting walk groups basis vectors by eigenvalue rows") {
  const double a = std::sqrt(0.7), b = std::sqrt(0.3);
  const std::vector<std::vector<Complex>> zeta{{a, b}, {a, b}, {Complex(0, 0.5), std::sqrt(0.75)}};
  std::mt19937_64 rng(5);
  for (const CMatrix& basis : {CMatrix(CMatrix::Identity(3, 3)), testing::random_unitary(3, rng)}) {
    const WalkModel m = testing::commuting(testing::lattice_moves(1), zeta, basis);
    const SpaceDecomposition dec = decompose(m);
    CHECK(dec.transient.empty());
    REQUIRE(dec.blocks.size() == 2);
    CHECK(dec.blocks[0].subspace.dim() + dec.blocks[1].subspace.dim() == 3);
    const auto& two = dec.blocks[0].subspace.dim() == 2 ? dec.blocks[0] : dec.blocks[1];
    const auto& one = dec.blocks[0].subspace.dim() == 2 ? dec.blocks[1] : dec.blocks[0];
    CHECK(two.multiplicity() == 2);
    CHECK(subspace_distance(two.subspace, Subspace::span(basis.leftCols(2))) < 1e-8);
    CHECK(subspace_distance(one.subspace, Subspace::span(basis.col(2))) < 1e-8);
  }
}

TEST_CASE("generic random walk is irreducible") {
  std::mt19937_64 rng(17);
  const WalkModel m = testing::random_model(3, 1, rng);
  const SpaceDecomposition dec = decompose(m);
  CHECK(dec.transient.empty());
  REQUIRE(dec.blocks.size() == 1);
  CHECK(dec.blocks[0].multiplicity() == 1);
}

TEST_CASE("decomposition is reproducible for a fixed seed") {
  const WalkModel m = testing::four_level(0.1, 0.2, 0.2);
  const SpaceDecomposition a = decompose(m, 99);
  const SpaceDecomposition b = decompose(m, 99);
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    for (Index e = 0; e < a.blocks[k].multiplicity(); ++e) {
      const auto i = static_cast<std::size_t>(e);
      CHECK((a.blocks[k].minimal_enclosures[i].basis() - b.blocks[k].minimal_enclosures[i].basis()).norm() == 0.0);
    }
  }
}

TEST_CASE("fixed and harmonic spaces of the four-level walk") {
  const ChannelView view(testing::four_level(1.0 / 6, 1.0 / 6, 1.0 / 6));
  // Invariant operators: any operator on span{e1,e2} plus |e3><e3|.
  CHECK(invariant_operators(view).size() == 5);
  CHECK(harmonic_operators(view).size() == 5);
}

TEST_CASE("absorption operator of span{e3} has the closed form") {
  for (double p3 : {1.0 / 6, 0.5, 0.25, 0.05}) {
    const double rest = (0.5 - p3) / 2.0;
    const WalkModel m = testing::four_level(rest, rest, p3);
    const SpaceDecomposition dec = decompose(m);
    const AbsorptionOperator a2 = absorption(m, dec, Subspace::coordinates(4, {3}));
    const CMatrix expected = 2.0 * p3 * testing::ketbra(4, 0) + testing::ketbra(4, 3);
    CHECK((a2.matrix - expected).cwiseAbs().maxCoeff() < 1e-9);
    const AbsorptionOperator a1 = absorption(m, dec, dec.blocks[0].subspace);
    CHECK((a1.matrix + a2.matrix - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("absorption operators are harmonic, bounded and match iteration") {
  const WalkModel m = testing::four_level(0.1, 0.3, 0.1);
  const SpaceDecomposition dec = decompose(m);
  const ChannelView view(m);
  for (const auto& block : dec.blocks) {
    for (const auto& v : block.minimal_enclosures) {
      const AbsorptionOperator a = absorption(m, dec, v);
      CHECK((apply_dual(view, a.matrix) - a.matrix).norm() < 1e-10);
      const HermitianEigen e = eig_hermitian(a.matrix);
      CHECK(e.values.maxCoeff() <= 1.0 + 1e-10);
      CHECK(e.values.minCoeff() >= -1e-10);
      CHECK((absorption_by_iteration(m, v) - a.matrix).norm() < 1e-6);
    }
  }
  CHECK((absorption(m, Subspace::full(4)).matrix - CMatrix::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("absorption rejects subspaces that are not enclosures") {
  const WalkModel m = testing::four_level(0.1, 0.3, 0.1);
  try {
    absorption(m, Subspace::coordinates(4, {0}));
    FAIL("expected NotAnEnclosure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAnEnclosure);
  }
}

TEST_CASE("absorption weights follow the closed-form split") {
  std::mt19937_64 rng(23);
  const double p1 = 0.1, p2 = 0.15, p3 = 0.25;
  const WalkModel m = testing::four_level(p1, p2, p3);
  const SpaceDecomposition dec = decompose(m);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix rho0 = testing::random_density(4, rng);
    const AbsorptionWeights w = weights(m, dec, testing::at_origin(rho0));
    const double a_e3 = 2.0 * p3 * rho0(0, 0).real() + rho0(3, 3).real();
    const double a_e12 = 2.0 * (p1 + p2) * rho0(0, 0).real() + rho0(1, 1).real() + rho0(2, 2).real();
    CHECK(w.block[1] == Approx(a_e3).margin(1e-10));
    CHECK(w.block[0] == Approx(a_e12).margin(1e-10));
    CHECK(w.block[0] + w.block[1] == Approx(1.0).margin(1e-9));
    CHECK(w.enclosure[0][0] + w.enclosure[0][1] == Approx(w.block[0]).margin(1e-9));
  }
}

TEST_CASE("weights see the state through its local marginal") {
  const WalkModel m = testing::four_level(0.1, 0.15, 0.25);
  const SpaceDecomposition dec = decompose(m);
  DiagonalState spread;
  spread.entries.push_back({Eigen::VectorXi::Constant(1, -3), 0.5 * testing::ketbra(4, 0)});
  spread.entries.push_back({Eigen::VectorXi::Constant(1, 7), 0.5 * testing::ketbra(4, 3)});
  const AbsorptionWeights w = weights(m, dec, spread);
  CHECK(w.block[1] == Approx(0.5 * 0.5 + 0.5).margin(1e-10));
}

TEST_CASE("reachable space from the transient vector") {
  const double p1 = 0.1, p2 = 0.3, p3 = 0.1;
  const WalkModel m = testing::four_level(p1, p2, p3);
  const Subspace reach = reachable_space(m, testing::at_origin(testing::ketbra(4, 0)));
  CVector mixed = CVector::Zero(4);
  mixed(1) = std::sqrt(p1);
  mixed(2) = std::sqrt(p2);
  CMatrix expected(4, 3);
  expected << 1, 0, 0, 0, mixed(1), 0, 0, mixed(2), 0, 0, 0, 1;
  CHECK(subspace_distance(reach, Subspace::span(expected)) < 1e-8);
  CHECK(enclosure_defect(m, reach) < 1e-9);

  const SpaceDecomposition dec = decompose(m);
  const AbsorptionOperator a = absorption(m, dec, dec.blocks[1].subspace);
  const Subspace q = absorbed_reachable_space(a, reach);
  CHECK(subspace_distance(q, Subspace::coordinates(4, {0, 3})) < 1e-8);
}

TEST_CASE("state validation errors") {
  const WalkModel m = testing::two_level();
  DiagonalState bad_trace = testing::at_origin(0.5 * testing::ketbra(2, 0));
  CHECK(state_error(bad_trace, m) == ErrorCode::InvalidState);
  CMatrix neg = testing::ketbra(2, 0) * 1.5 - 0.5 * testing::ketbra(2, 1);
  CHECK(state_error(testing::at_origin(neg), m) == ErrorCode::InvalidState);
  CHECK(state_error(testing::at_origin(testing::ketbra(3, 0)), m) == ErrorCode::InvalidState);
  DiagonalState wrong_site = testing::at_origin(testing::ketbra(2, 0), 2);
  CHECK(state_error(wrong_site, m) == ErrorCode::InvalidState);
  CHECK(state_error(DiagonalState{}, m) == ErrorCode::InvalidState);
  CHECK_NOTHROW(validate(testing::at_origin(testing::ketbra(2, 1)), m));
}
