#include "oqrw/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "oqrw/error.hpp"

namespace oqrw {
namespace {

constexpr double kDiracSigma = 1e-14;
constexpr double kWeightFloor = 1e-12;

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }  // 1 - Phi(z)
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

RVector resolve_axis(Index d, const std::optional<RVector>& axis) {
  if (!axis) {
    if (d != 1) throw Error(ErrorCode::MissingAxis, "lattice dimension " + std::to_string(d) + " needs a projection axis");
    return RVector::Ones(1);
  }
  if (axis->size() != d) throw Error(ErrorCode::DimensionMismatch, "axis length does not match the lattice dimension");
  return *axis;
}

EmpiricalLaw1D displacement_law(const TrajectoryEnsemble& ensemble, long n, const std::optional<RVector>& axis,
                                double scale) {
  const auto it = ensemble.snapshots.find(n);
  if (it == ensemble.snapshots.end()) {
    throw Error(ErrorCode::HorizonMismatch, "ensemble has no snapshot at n = " + std::to_string(n));
  }
  if (ensemble.initial_positions.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble is empty");
  const RVector a = resolve_axis(ensemble.initial_positions.front().size(), axis);
  std::vector<double> samples;
  samples.reserve(it->second.size());
  for (std::size_t t = 0; t < it->second.size(); ++t) {
    const Eigen::VectorXi delta = it->second[t] - ensemble.initial_positions[t];
    samples.push_back(n == 0 ? 0.0 : delta.cast<double>().dot(a) / scale);
  }
  return EmpiricalLaw1D::from_samples(std::move(samples), n);
}

// Distinct sample values with the empirical CDF just right of each.
struct StepCdf {
  std::vector<double> value;
  std::vector<double> cum;
};

StepCdf step_cdf(const EmpiricalLaw1D& emp) {
  StepCdf s;
  const double n = static_cast<double>(emp.count());
  for (std::size_t i = 0; i < emp.samples.size(); ++i) {
    if (i + 1 < emp.samples.size() && emp.samples[i + 1] == emp.samples[i]) continue;
    s.value.push_back(emp.samples[i]);
    s.cum.push_back(static_cast<double>(i + 1) / n);
  }
  return s;
}

// int_a^b |c - F(t)| dt for the nondecreasing mixture CDF F.
double abs_gap_integral(const ProjectedMixture& m, double a, double b, double c) {
  auto integral = [&](double lo, double hi) { return m.integral_below(hi) - m.integral_below(lo); };
  if (b <= a) return 0.0;
  if (m.cdf(a) >= c) return std::max(0.0, integral(a, b) - c * (b - a));
  if (m.cdf_left(b) <= c) return std::max(0.0, c * (b - a) - integral(a, b));
  // F crosses c inside (a, b): bisect for inf{t : F(t) >= c}.
  double lo = a, hi = b;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (m.cdf(mid) >= c) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double x = hi;
  return std::max(0.0, c * (x - a) - integral(a, x)) + std::max(0.0, integral(x, b) - c * (b - x));
}

}  // namespace

EmpiricalLaw1D EmpiricalLaw1D::from_samples(std::vector<double> samples, long horizon) {
  std::sort(samples.begin(), samples.end());
  return {std::move(samples), horizon};
}

EmpiricalLaw1D rescale(const TrajectoryEnsemble& ensemble, long n, const std::optional<RVector>& axis) {
  return displacement_law(ensemble, n, axis, std::sqrt(static_cast<double>(n)));
}

EmpiricalLaw1D mean_displacement(const TrajectoryEnsemble& ensemble, long n, const std::optional<RVector>& axis) {
  return displacement_law(ensemble, n, axis, static_cast<double>(n));
}

double ProjectedMixture::cdf(double x) const {
  double f = 0.0;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    f += weight[k] * (sigma[k] > 0.0 ? normal_cdf((x - mean[k]) / sigma[k]) : (x >= mean[k] ? 1.0 : 0.0));
  }
  return std::clamp(f, 0.0, 1.0);
}

double ProjectedMixture::cdf_left(double x) const {
  double f = 0.0;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    f += weight[k] * (sigma[k] > 0.0 ? normal_cdf((x - mean[k]) / sigma[k]) : (x > mean[k] ? 1.0 : 0.0));
  }
  return std::clamp(f, 0.0, 1.0);
}

double ProjectedMixture::integral_below(double x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    if (sigma[k] > 0.0) {
      const double z = (x - mean[k]) / sigma[k];
      s += weight[k] * sigma[k] * (z * normal_cdf(z) + phi(z));
    } else {
      s += weight[k] * std::max(0.0, x - mean[k]);
    }
  }
  return s;
}

double ProjectedMixture::integral_above(double x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    if (sigma[k] > 0.0) {
      const double z = (x - mean[k]) / sigma[k];
      s += weight[k] * sigma[k] * (phi(z) - z * upper_tail(z));
    } else {
      s += weight[k] * std::max(0.0, mean[k] - x);
    }
  }
  return s;
}

ProjectedMixture project(const MixtureModel& mixture, const std::optional<RVector>& axis) {
  ProjectedMixture p;
  if (mixture.components.empty()) return p;
  const RVector a = resolve_axis(mixture.components.front().gaussian.mean_rate.size(), axis);
  for (std::size_t k = 0; k < mixture.components.size(); ++k) {
    const auto& c = mixture.components[k];
    if (c.weight <= kWeightFloor) continue;
    const double var = a.dot(c.gaussian.covariance * a);
    const double sd = std::sqrt(std::max(0.0, var));
    p.weight.push_back(c.weight);
    p.mean.push_back(mixture.mean_at_horizon(k).dot(a));
    p.sigma.push_back(sd < kDiracSigma ? 0.0 : sd);
  }
  return p;
}

double mixture_cdf(const MixtureModel& mixture, double x, const std::optional<RVector>& axis) {
  return project(mixture, axis).cdf(x);
}

DistanceReport w1_distance(const EmpiricalLaw1D& emp, const ProjectedMixture& mixture) {
  if (emp.samples.empty()) throw Error(ErrorCode::EmptyEnsemble, "empirical law has no samples");
  const StepCdf s = step_cdf(emp);
  DistanceReport r;
  const std::size_t m = s.value.size();
  r.w1 = mixture.integral_below(s.value.front()) + mixture.integral_above(s.value.back());
  double prev = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = s.value[i];
    r.ks = std::max({r.ks, std::abs(s.cum[i] - mixture.cdf(v)), std::abs(prev - mixture.cdf_left(v))});
    if (i + 1 < m) r.w1 += abs_gap_integral(mixture, v, s.value[i + 1], s.cum[i]);
    prev = s.cum[i];
  }
  return r;
}

DistanceReport w1_distance(const EmpiricalLaw1D& emp, const MixtureModel& mixture, const std::optional<RVector>& axis) {
  return w1_distance(emp, project(mixture, axis));
}

DistanceReport w1_distance(const EmpiricalLaw1D& a, const EmpiricalLaw1D& b) {
  if (a.samples.empty() || b.samples.empty()) throw Error(ErrorCode::EmptyEnsemble, "empirical law has no samples");
  std::vector<double> grid;
  grid.reserve(a.count() + b.count());
  std::merge(a.samples.begin(), a.samples.end(), b.samples.begin(), b.samples.end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  auto cdf = [](const EmpiricalLaw1D& e, double x) {
    const auto k = std::upper_bound(e.samples.begin(), e.samples.end(), x) - e.samples.begin();
    return static_cast<double>(k) / static_cast<double>(e.count());
  };
  DistanceReport r;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double gap = std::abs(cdf(a, grid[i]) - cdf(b, grid[i]));
    r.ks = std::max(r.ks, gap);
    if (i + 1 < grid.size()) r.w1 += gap * (grid[i + 1] - grid[i]);
  }
  return r;
}

std::vector<LdpRow> ldp_estimate(const TrajectoryEnsemble& ensemble, const std::vector<long>& horizons, double lo,
                                 double hi, double rate_bound, const std::optional<RVector>& axis) {
  std::vector<LdpRow> rows;
  for (long n : horizons) {
    if (n <= 0) throw Error(ErrorCode::InvalidState, "large-deviation horizons must be positive");
    const EmpiricalLaw1D law = mean_displacement(ensemble, n, axis);
    const auto first = std::lower_bound(law.samples.begin(), law.samples.end(), lo);
    const auto last = std::upper_bound(law.samples.begin(), law.samples.end(), hi);
    const auto hits = last > first ? last - first : 0;
    LdpRow row;
    row.n = n;
    row.rate_bound = rate_bound;
    row.log_freq_over_n = hits == 0 ? -std::numeric_limits<double>::infinity()
                                     : std::log(static_cast<double>(hits) / static_cast<double>(law.count())) /
                                           static_cast<double>(n);
    rows.push_back(row);
  }
  return rows;
}

double rate_infimum(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState& rho, double lo,
                    double hi) {
  if (model.lattice_dim != 1) throw Error(ErrorCode::DimensionMismatch, "rate infimum over an interval needs d = 1");
  if (hi < lo) std::swap(lo, hi);
  const AbsorptionWeights w = weights(model, dec, rho);
  for (std::size_t a = 0; a < dec.blocks.size(); ++a) {
    if (w.block[a] <= kWeightFloor) continue;
    const double m = drift(model, dec.blocks[a].minimal_enclosures.front())(0);
    if (m >= lo && m <= hi) return 0.0;
  }
  const double at_lo = rate_function(model, dec, rho, RVector::Constant(1, lo)).value;
  const double at_hi = rate_function(model, dec, rho, RVector::Constant(1, hi)).value;
  return std::min(at_lo, at_hi);
}

std::vector<HistogramRow> histogram(const EmpiricalLaw1D& emp, std::size_t bins) {
  if (emp.samples.empty()) throw Error(ErrorCode::EmptyEnsemble, "cannot histogram an empty ensemble");
  if (bins == 0) throw Error(ErrorCode::InvalidState, "histogram needs at least one bin");
  double lo = emp.samples.front();
  double hi = emp.samples.back();
  if (hi <= lo) {
    // All samples coincide: one unit-width bin around them.
    return {{lo - 0.5, lo + 0.5, 1.0}};
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : emp.samples) {
    auto k = static_cast<std::size_t>((x - lo) / width);
    ++counts[std::min(k, bins - 1)];
  }
  std::vector<HistogramRow> rows(bins);
  const double n = static_cast<double>(emp.count());
  for (std::size_t k = 0; k < bins; ++k) {
    rows[k].bin_left = lo + width * static_cast<double>(k);
    rows[k].bin_right = k + 1 == bins ? hi : lo + width * static_cast<double>(k + 1);
    rows[k].density = static_cast<double>(counts[k]) / (n * width);
  }
  return rows;
}

std::vector<CdfRow> cdf_table(const EmpiricalLaw1D& emp, const ProjectedMixture& mixture, std::size_t points) {
  if (emp.samples.empty()) throw Error(ErrorCode::EmptyEnsemble, "empirical law has no samples");
  const double lo = emp.samples.front();
  const double hi = emp.samples.back();
  const std::size_t count = hi > lo ? std::max<std::size_t>(points, 2) : 1;
  std::vector<CdfRow> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    const auto k = std::upper_bound(emp.samples.begin(), emp.samples.end(), x) - emp.samples.begin();
    rows.push_back({x, static_cast<double>(k) / static_cast<double>(emp.count()), mixture.cdf(x)});
  }
  return rows;
}

}  // namespace oqrw
