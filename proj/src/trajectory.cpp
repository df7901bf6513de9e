#include "oqrw/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "oqrw/error.hpp"

namespace oqrw {
namespace {

constexpr double kTolDegenerate = 1e-14;
constexpr double kTolTrack = 1e-8;
constexpr int kHermitizeEvery = 50;
constexpr Index kSmallDim = 16;

// Inverse CDF over unnormalized probabilities; never returns a branch of
// probability zero.
template <class Probs>
Index pick_branch(const Probs& p, Index count, double total, double u) {
  const double target = u * total;
  double acc = 0.0;
  Index last_positive = -1;
  for (Index j = 0; j < count; ++j) {
    if (p[j] <= 0.0) continue;
    last_positive = j;
    acc += p[j];
    if (target < acc) return j;
  }
  return last_positive;
}

template <class Mat>
double real_trace_product(const Mat& a, const Mat& b) {
  // Re Tr(a b)
  return a.cwiseProduct(b.transpose()).sum().real();
}

void check_track_value(double y, const std::string& id) {
  if (!(y >= -kTolTrack && y <= 1.0 + kTolTrack)) {
    throw Error(ErrorCode::AssertionFailure, "absorption martingale for '" + id + "' left [0,1]: " + std::to_string(y));
  }
}

std::vector<long> horizons_of(const SimConfig& config) {
  std::vector<long> h = config.snapshot_steps;
  h.push_back(config.steps);
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  for (long n : h) {
    if (n < 0 || n > config.steps) {
      throw Error(ErrorCode::InvalidState, "snapshot horizon " + std::to_string(n) + " outside [0, steps]");
    }
  }
  return h;
}

std::size_t track_samples(const SimConfig& config) {
  const long stride = config.Y_snapshot_stride;
  std::size_t count = static_cast<std::size_t>(config.steps / stride) + 1;
  if (config.steps % stride != 0) ++count;
  return count;
}

// Per-trajectory simulation kernel over a matrix type that is either
// stack-bounded (small h) or fully dynamic.
template <class Mat>
class Kernel {
 public:
  Kernel(const WalkModel& model, const DiagonalState& rho, const SimConfig& config, TrajectoryEnsemble& out)
      : model_(model), rho_(rho), config_(config), out_(out), horizons_(horizons_of(config)) {
    for (const auto& k : model.kraus) {
      kraus_.emplace_back(k);
      kraus_adj_.emplace_back(k.adjoint());
      gram_.emplace_back(k.adjoint() * k);
    }
    for (const auto& t : config.record_Y_for) tracks_.emplace_back(t.absorption);
  }

  void simulate(std::size_t t) {
    const CounterRng rng(config_.seed, t);
    const TrajectoryState init = sample_initial(rho_, rng);
    Eigen::VectorXi x = init.position;
    Mat rho = init.rho;
    Mat next(rho.rows(), rho.cols());
    const Index branches = model_.branches();
    std::vector<double> p(static_cast<std::size_t>(branches));

    out_.initial_positions[t] = x;
    if (config_.record_positions) {
      out_.paths[t].reserve(static_cast<std::size_t>(config_.steps) + 1);
      out_.paths[t].push_back(x);
    }
    std::size_t horizon_idx = 0;
    auto snapshot = [&](long k) {
      while (horizon_idx < horizons_.size() && horizons_[horizon_idx] == k) {
        (*snap_ptr_[horizon_idx])[t] = x;
        ++horizon_idx;
      }
    };
    auto record_tracks = [&](long k) {
      const bool on_stride = k % config_.Y_snapshot_stride == 0;
      if (!on_stride && k != config_.steps) return;
      for (std::size_t a = 0; a < tracks_.size(); ++a) {
        const double y = real_trace_product(tracks_[a], rho);
        check_track_value(y, config_.record_Y_for[a].id);
        (*track_ptr_[a])[t].push_back(y);
        if (k == config_.steps) (*final_ptr_[a])[t] = y;
      }
    };

    snapshot(0);
    record_tracks(0);
    for (long k = 1; k <= config_.steps; ++k) {
      double total = 0.0;
      for (Index j = 0; j < branches; ++j) {
        p[static_cast<std::size_t>(j)] = std::max(0.0, real_trace_product(gram_[static_cast<std::size_t>(j)], rho));
        total += p[static_cast<std::size_t>(j)];
      }
      if (total < kTolDegenerate) {
        throw Error(ErrorCode::DegenerateStep, "all branch probabilities vanish at step " + std::to_string(k));
      }
      const Index j = pick_branch(p, branches, total, rng.uniform(static_cast<std::uint64_t>(k)));
      const auto js = static_cast<std::size_t>(j);
      next.noalias() = kraus_[js] * rho;
      rho.noalias() = next * kraus_adj_[js];
      rho /= rho.trace().real();
      if (k % kHermitizeEvery == 0) {
        next = rho.adjoint();
        rho = (rho + next) * 0.5;
      }
      x += model_.shifts[js];
      if (config_.record_positions) out_.paths[t].push_back(x);
      snapshot(k);
      record_tracks(k);
    }
    out_.final_positions[t] = x;
  }

  // Associative lookups happen once here; workers only touch vector slots.
  void bind_tracks() {
    for (long h : horizons_) snap_ptr_.push_back(&out_.snapshots.at(h));
    for (const auto& tr : config_.record_Y_for) {
      track_ptr_.push_back(&out_.y_tracks[tr.id]);
      final_ptr_.push_back(&out_.y_final[tr.id]);
    }
  }

 private:
  const WalkModel& model_;
  const DiagonalState& rho_;
  const SimConfig& config_;
  TrajectoryEnsemble& out_;
  std::vector<long> horizons_;
  std::vector<Mat> kraus_, kraus_adj_, gram_, tracks_;
  std::vector<std::vector<std::vector<double>>*> track_ptr_;
  std::vector<std::vector<double>*> final_ptr_;
  std::vector<std::vector<Eigen::VectorXi>*> snap_ptr_;
};

template <class Mat>
void run_kernel(const WalkModel& model, const DiagonalState& rho, const SimConfig& config, TrajectoryEnsemble& out) {
  Kernel<Mat> kernel(model, rho, config, out);
  kernel.bind_tracks();
  const std::size_t n = static_cast<std::size_t>(config.trajectories);
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t t = 0; t < n; ++t) kernel.simulate(t);
    return;
  }
  // Every trajectory owns its output slots, so chunks never share writes.
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = w; t < n; t += threads) kernel.simulate(t);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace

TrajectoryState sample_initial(const DiagonalState& rho, const CounterRng& rng) {
  std::vector<double> traces;
  traces.reserve(rho.entries.size());
  double total = 0.0;
  for (const auto& e : rho.entries) {
    traces.push_back(std::max(0.0, e.matrix.trace().real()));
    total += traces.back();
  }
  if (traces.empty() || total <= 0.0) throw Error(ErrorCode::InvalidState, "initial state has no mass");
  const Index k = pick_branch(traces, static_cast<Index>(traces.size()), total, rng.uniform(0));
  const auto& entry = rho.entries[static_cast<std::size_t>(k)];
  return {entry.site, entry.matrix / traces[static_cast<std::size_t>(k)]};
}

TrajectoryState step(const TrajectoryState& state, const WalkModel& model, double u) {
  const Index branches = model.branches();
  std::vector<double> p(static_cast<std::size_t>(branches));
  std::vector<CMatrix> images;
  double total = 0.0;
  for (Index j = 0; j < branches; ++j) {
    const CMatrix& k = model.kraus[static_cast<std::size_t>(j)];
    images.push_back(k * state.rho * k.adjoint());
    p[static_cast<std::size_t>(j)] = std::max(0.0, images.back().trace().real());
    total += p[static_cast<std::size_t>(j)];
  }
  if (total < kTolDegenerate) throw Error(ErrorCode::DegenerateStep, "all branch probabilities vanish");
  const Index j = pick_branch(p, branches, total, u);
  const auto js = static_cast<std::size_t>(j);
  return {state.position + model.shifts[js], images[js] / p[js]};
}

TrajectoryState step(const TrajectoryState& state, const WalkModel& model, const CounterRng& rng,
                     std::uint64_t index) {
  return step(state, model, rng.uniform(index));
}

TrajectoryEnsemble run(const WalkModel& model, const DiagonalState& rho, const SimConfig& config) {
  validate(model);
  validate(rho, model);
  if (config.steps < 0) throw Error(ErrorCode::InvalidState, "steps must be nonnegative");
  if (config.trajectories < 1) throw Error(ErrorCode::InvalidState, "at least one trajectory is required");
  if (config.Y_snapshot_stride < 1) throw Error(ErrorCode::InvalidState, "Y stride must be positive");
  for (const auto& t : config.record_Y_for) {
    if (t.absorption.rows() != model.local_dim() || t.absorption.cols() != model.local_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "tracked operator '" + t.id + "' has the wrong shape");
    }
  }

  TrajectoryEnsemble out;
  out.config = config;
  const auto n = static_cast<std::size_t>(config.trajectories);
  out.initial_positions.resize(n);
  out.final_positions.resize(n);
  for (long h : horizons_of(config)) out.snapshots[h].resize(n);
  if (config.record_positions) out.paths.resize(n);
  for (const auto& t : config.record_Y_for) {
    auto& per = out.y_tracks[t.id];
    per.resize(n);
    for (auto& v : per) v.reserve(track_samples(config));
    out.y_final[t.id].assign(n, 0.0);
  }

  if (model.local_dim() <= kSmallDim) {
    run_kernel<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kSmallDim, kSmallDim>>(
        model, rho, config, out);
  } else {
    run_kernel<CMatrix>(model, rho, config, out);
  }
  return out;
}

double martingale_check(const WalkModel& model, const CMatrix& absorption, const std::vector<CMatrix>& states) {
  double worst = 0.0;
  for (const CMatrix& raw : states) {
    const CMatrix rho = raw / raw.trace().real();
    const double y0 = real_trace_product(absorption, rho);
    double expected = 0.0;
    for (const CMatrix& k : model.kraus) {
      const CMatrix image = k * rho * k.adjoint();
      const double p = image.trace().real();
      if (p <= 0.0) continue;
      expected += p * (real_trace_product(absorption, image) / p);
    }
    worst = std::max(worst, std::abs(expected - y0));
  }
  return worst;
}

AbsorptionFractions classify_absorption(const TrajectoryEnsemble& ensemble, const std::string& track_id, double hi,
                                        double lo) {
  const auto it = ensemble.y_final.find(track_id);
  if (it == ensemble.y_final.end()) throw Error(ErrorCode::MissingTrack, "no Y track recorded for '" + track_id + "'");
  const auto& ys = it->second;
  if (ys.empty()) throw Error(ErrorCode::EmptyEnsemble, "Y track '" + track_id + "' is empty");
  std::size_t high = 0, low = 0;
  for (double y : ys) {
    if (y > hi) {
      ++high;
    } else if (y < lo) {
      ++low;
    }
  }
  const double n = static_cast<double>(ys.size());
  return {high / n, low / n, static_cast<double>(ys.size() - high - low) / n};
}

}  // namespace oqrw
