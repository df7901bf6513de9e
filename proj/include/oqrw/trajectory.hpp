#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oqrw/philox.hpp"
#include "oqrw/structure.hpp"

namespace oqrw {

struct TrackedEnclosure {
  std::string id;
  CMatrix absorption;  // Y_n = Tr(A rho_n)
};

struct SimConfig {
  long steps = 1;
  long trajectories = 1;
  std::uint64_t seed = 0;
  bool record_positions = false;  // full position paths
  std::vector<TrackedEnclosure> record_Y_for;
  long Y_snapshot_stride = 1;
  // Extra horizons (<= steps) at which X_n is captured; `steps` is always one.
  std::vector<long> snapshot_steps;
  unsigned threads = 1;  // 0 = hardware concurrency
};

struct TrajectoryState {
  Eigen::VectorXi position;
  CMatrix rho;
};

struct TrajectoryEnsemble {
  SimConfig config;
  std::vector<Eigen::VectorXi> initial_positions;
  std::vector<Eigen::VectorXi> final_positions;
  // horizon -> X_n per trajectory (includes `steps`)
  std::map<long, std::vector<Eigen::VectorXi>> snapshots;
  std::vector<std::vector<Eigen::VectorXi>> paths;  // only with record_positions
  // track id -> per trajectory Y_0, Y_stride, ..., and always Y_steps last
  std::map<std::string, std::vector<std::vector<double>>> y_tracks;
  std::map<std::string, std::vector<double>> y_final;

  std::size_t size() const { return final_positions.size(); }
};

// Draw index 0 of the stream picks the site; draws 1..n pick the branches.
TrajectoryState sample_initial(const DiagonalState& rho, const CounterRng& rng);
// One quantum-trajectory step using the uniform `u`.
TrajectoryState step(const TrajectoryState& state, const WalkModel& model, double u);
TrajectoryState step(const TrajectoryState& state, const WalkModel& model, const CounterRng& rng, std::uint64_t index);

TrajectoryEnsemble run(const WalkModel& model, const DiagonalState& rho, const SimConfig& config);

// max over states of |E[Y_1 | rho] - Y_0| for Y = Tr(A rho): exact one-step
// algebra, no sampling.
double martingale_check(const WalkModel& model, const CMatrix& absorption, const std::vector<CMatrix>& states);

struct AbsorptionFractions {
  double high = 0.0;
  double low = 0.0;
  double middle = 0.0;
};

AbsorptionFractions classify_absorption(const TrajectoryEnsemble& ensemble, const std::string& track_id,
                                        double hi = 0.99, double lo = 0.01);

}  // namespace oqrw
