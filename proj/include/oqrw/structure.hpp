#pragma once

#include <cstdint>
#include <vector>

#include "oqrw/channel.hpp"

namespace oqrw {

inline constexpr std::uint64_t kDefaultDecompositionSeed = 20210611;

// rho = sum_k rho(k) (x) |k><k| on the lattice.
struct DiagonalState {
  struct Entry {
    Eigen::VectorXi site;
    CMatrix matrix;
  };
  std::vector<Entry> entries;

  // sum_k rho(k): every quantity that only depends on the local channel
  // (weights, reachable space) sees the state through this operator.
  CMatrix local_marginal(Index h) const;
};

void validate(const DiagonalState& rho, const WalkModel& model);
DiagonalState localized_state(const CMatrix& rho0, int lattice_dim);

struct Block {
  Subspace subspace;                          // chi_alpha
  std::vector<Subspace> minimal_enclosures;   // V_{alpha,beta}
  std::vector<CMatrix> enclosure_states;      // invariant state of each V, in its basis
  Index multiplicity() const { return static_cast<Index>(minimal_enclosures.size()); }
  // Invariant state of the representative (first) minimal enclosure.
  const CMatrix& invariant_state() const { return enclosure_states.front(); }
};

struct SpaceDecomposition {
  Subspace recurrent;
  Subspace transient;
  std::vector<Block> blocks;
};

struct AbsorptionOperator {
  Subspace enclosure;
  CMatrix matrix;
  // Support projection of the absorption operator.
  Projector support;
};

// Hermitian basis of {sigma : L(sigma) = sigma} on the view's domain (u = 0).
std::vector<CMatrix> invariant_operators(const ChannelView& view);
// Hermitian basis of {x : L^*(x) = x} on the view's domain (u = 0).
std::vector<CMatrix> harmonic_operators(const ChannelView& view);

Subspace recurrent_space(const WalkModel& model);

// Recurrent/transient split, the canonical blocks and one decomposition of
// each block into minimal enclosures. Blocks are ordered by the diagonal of
// their projector (lexicographically descending) so ids are reproducible.
SpaceDecomposition decompose(const WalkModel& model, std::uint64_t seed = kDefaultDecompositionSeed);

AbsorptionOperator absorption(const WalkModel& model, const Subspace& enclosure);
AbsorptionOperator absorption(const WalkModel& model, const SpaceDecomposition& dec, const Subspace& enclosure);
// Tail Cesaro mean of L^{*n}(p_V) for n in [iterations/2, iterations]; the
// limit definition, used as a cross-check only.
CMatrix absorption_by_iteration(const WalkModel& model, const Subspace& enclosure, int iterations = 2000);

// Smallest enclosure containing the supports of all rho(k).
Subspace reachable_space(const WalkModel& model, const DiagonalState& rho);

// p~_V E(rho): the part of the reachable space seen by the absorption
// operator of V.
Subspace absorbed_reachable_space(const AbsorptionOperator& a, const Subspace& reachable);

struct AbsorptionWeights {
  std::vector<double> block;                   // a_alpha
  std::vector<std::vector<double>> enclosure;  // a_{alpha,beta}
};

AbsorptionWeights weights(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState& rho);

}  // namespace oqrw
