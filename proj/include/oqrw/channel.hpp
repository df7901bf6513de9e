#pragma once

#include <vector>

#include "oqrw/linalg.hpp"

namespace oqrw {

inline constexpr double kTolTracePreserving = 1e-9;

// Homogeneous open quantum random walk: branch i moves the walker by
// shifts[i] and acts on the internal state with kraus[i].
struct WalkModel {
  int lattice_dim = 1;
  std::vector<Eigen::VectorXi> shifts;
  std::vector<CMatrix> kraus;

  Index local_dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }
  Index branches() const { return static_cast<Index>(kraus.size()); }
  RVector shift(Index i) const { return shifts[static_cast<std::size_t>(i)].cast<double>(); }
};

// ||sum_i L_i^* L_i - 1||_F
double trace_preservation_deviation(const WalkModel& model);

// Shape checks (InvalidModel) followed by the normalization check
// (NotTracePreserving).
void validate(const WalkModel& model);

// The local channel compressed to a subspace and exponentially tilted:
// Kraus family {e^{u.s_i/2} P L_i P}, expressed in the subspace basis.
class ChannelView {
 public:
  explicit ChannelView(const WalkModel& model);
  ChannelView(const WalkModel& model, Subspace domain, RVector deformation = RVector());

  const Subspace& domain() const { return domain_; }
  const RVector& deformation() const { return u_; }
  Index dim() const { return domain_.dim(); }
  int lattice_dim() const { return lattice_dim_; }
  Index branches() const { return static_cast<Index>(kraus_.size()); }

  // B^* L_i B, undeformed.
  const std::vector<CMatrix>& compressed_kraus() const { return kraus_; }
  const RMatrix& shifts() const { return shifts_; }  // branches x lattice_dim
  // e^{u.s_i}
  const std::vector<double>& weights() const { return weights_; }

  ChannelView with_deformation(const RVector& u) const;

  // sum_i c_i K_i sigma K_i^* for arbitrary per-branch coefficients; used for
  // the derivative maps L'_u and L''_u.
  CMatrix apply_weighted(const std::vector<double>& coeff, const CMatrix& sigma) const;
  CMatrix apply_dual_weighted(const std::vector<double>& coeff, const CMatrix& x) const;

 private:
  Subspace domain_;
  RVector u_;
  int lattice_dim_ = 1;
  std::vector<CMatrix> kraus_;
  RMatrix shifts_;
  std::vector<double> weights_;
};

struct SuperoperatorMatrix {
  CMatrix matrix;  // acts on column-major vectorized k x k operators
};

struct PerronData {
  double lambda = 0.0;
  CMatrix tau;  // positive, trace one
  CMatrix w;    // positive, unit Frobenius norm
  double spectral_gap = 0.0;
};

CMatrix apply(const ChannelView& view, const CMatrix& sigma);
CMatrix apply_dual(const ChannelView& view, const CMatrix& x);
SuperoperatorMatrix to_matrix(const ChannelView& view);
SuperoperatorMatrix to_dual_matrix(const ChannelView& view);

// Spectral radius of the (possibly deformed, compressed) channel.
double spectral_radius(const ChannelView& view);
PerronData perron(const ChannelView& view);

// Kraus characterization of enclosures: max_i ||L_i P - P L_i P||.
double enclosure_defect(const WalkModel& model, const Subspace& s);

}  // namespace oqrw
