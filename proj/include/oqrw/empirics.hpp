#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oqrw/asymptotics.hpp"
#include "oqrw/trajectory.hpp"

namespace oqrw {

struct EmpiricalLaw1D {
  std::vector<double> samples;  // sorted ascending
  long horizon = 0;

  std::size_t count() const { return samples.size(); }
  static EmpiricalLaw1D from_samples(std::vector<double> samples, long horizon);
};

struct DistanceReport {
  double w1 = 0.0;
  double ks = 0.0;
  std::string note = "W1 upper-bounds the Fortet-Mourier distance";
};

// (X_n - X_0).axis / sqrt(n); n = 0 gives zeros.
EmpiricalLaw1D rescale(const TrajectoryEnsemble& ensemble, long n, const std::optional<RVector>& axis = std::nullopt);
// (X_n - X_0).axis / n, the law behind the large-deviation estimates.
EmpiricalLaw1D mean_displacement(const TrajectoryEnsemble& ensemble, long n,
                                 const std::optional<RVector>& axis = std::nullopt);

// Projection of a mixture onto an axis: weights, means sqrt(n) m.axis and
// standard deviations sqrt(axis^T D axis). Zero deviation means a Dirac mass.
struct ProjectedMixture {
  std::vector<double> weight;
  std::vector<double> mean;
  std::vector<double> sigma;

  double cdf(double x) const;
  // lim_{y -> x-} F(y); differs from cdf only at Dirac atoms.
  double cdf_left(double x) const;
  // int_{-inf}^x F(t) dt
  double integral_below(double x) const;
  // int_x^inf (1 - F(t)) dt
  double integral_above(double x) const;
};

ProjectedMixture project(const MixtureModel& mixture, const std::optional<RVector>& axis = std::nullopt);

double mixture_cdf(const MixtureModel& mixture, double x, const std::optional<RVector>& axis = std::nullopt);

DistanceReport w1_distance(const EmpiricalLaw1D& emp, const ProjectedMixture& mixture);
DistanceReport w1_distance(const EmpiricalLaw1D& emp, const MixtureModel& mixture,
                           const std::optional<RVector>& axis = std::nullopt);
// Between two empirical laws: exact integral of |F_a - F_b| and the sup gap.
DistanceReport w1_distance(const EmpiricalLaw1D& a, const EmpiricalLaw1D& b);

struct LdpRow {
  long n = 0;
  double log_freq_over_n = 0.0;  // -inf when no sample falls in B
  double rate_bound = 0.0;       // -inf_{x in B} Lambda_rho(x)
};

// Frequencies of (X_n - X_0)/n in [lo, hi] at each horizon the ensemble
// captured; `rate_bound` is copied into every row.
std::vector<LdpRow> ldp_estimate(const TrajectoryEnsemble& ensemble, const std::vector<long>& horizons, double lo,
                                 double hi, double rate_bound, const std::optional<RVector>& axis = std::nullopt);

// inf over [lo, hi] of Lambda_rho for d = 1: zero when a contributing mean
// lies inside, otherwise the smaller endpoint value (each piece is convex).
double rate_infimum(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState& rho, double lo,
                    double hi);

struct HistogramRow {
  double bin_left = 0.0;
  double bin_right = 0.0;
  double density = 0.0;
};

std::vector<HistogramRow> histogram(const EmpiricalLaw1D& emp, std::size_t bins);

struct CdfRow {
  double x = 0.0;
  double f_emp = 0.0;
  double f_mix = 0.0;
};

// Both CDFs at `points` equally spaced values spanning the samples.
std::vector<CdfRow> cdf_table(const EmpiricalLaw1D& emp, const ProjectedMixture& mixture, std::size_t points);

}  // namespace oqrw
