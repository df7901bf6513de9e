// Command-line front end: validate | analyze | clt | simulate | compare | ldp.
//
// Exit codes: 0 success, 1 I/O, parse or input-consistency failure,
// 2 model/state validation failure, 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oqrw/empirics.hpp"
#include "oqrw/error.hpp"
#include "oqrw/io.hpp"

namespace fs = std::filesystem;
using namespace oqrw;
using io::Json;

namespace {

constexpr std::size_t kCdfPoints = 201;
constexpr std::size_t kHistogramBins = 60;

struct Options {
  std::string model;
  std::string state;
  std::string out;
  std::uint64_t seed = 0;
  std::string steps;
  long traj = 1000;
  std::string axis;
  std::string grid;
  std::vector<std::string> tracks;
  std::string sim;
  std::string clt;
  std::string interval;
  unsigned threads = 1;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::Io:
    case ErrorCode::HorizonMismatch:
    case ErrorCode::MissingAxis:
    case ErrorCode::MissingTrack:
      return 1;
    case ErrorCode::InvalidModel:
    case ErrorCode::NotTracePreserving:
    case ErrorCode::InvalidState:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotAnEnclosure:
      return 2;
    default:
      return 3;
  }
}

[[noreturn]] void usage_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    usage_error(what + ": '" + s + "' is not a number");
  }
}

long parse_integer(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    usage_error(what + ": '" + s + "' is not an integer");
  }
}

std::vector<long> parse_steps(const std::string& s) {
  if (s.empty()) usage_error("--steps is required");
  std::set<long> values;
  for (const auto& part : split(s, ',')) {
    const long n = parse_integer(part, "--steps");
    if (n < 0) usage_error("--steps entries must be nonnegative");
    values.insert(n);
  }
  return {values.begin(), values.end()};
}

std::optional<RVector> parse_axis(const std::string& s, int d) {
  if (s.empty()) {
    if (d == 1) return std::nullopt;
    throw Error(ErrorCode::MissingAxis, "lattice dimension " + std::to_string(d) + " needs --axis");
  }
  const auto parts = split(s, ',');
  if (static_cast<int>(parts.size()) != d) usage_error("--axis needs " + std::to_string(d) + " components");
  RVector a(d);
  for (int i = 0; i < d; ++i) a(i) = parse_number(parts[static_cast<std::size_t>(i)], "--axis");
  if (a.norm() == 0.0) usage_error("--axis must be nonzero");
  return RVector(a / a.norm());
}

std::vector<double> parse_grid(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) usage_error("--grid expects lo:hi:step");
  const double lo = parse_number(parts[0], "--grid");
  const double hi = parse_number(parts[1], "--grid");
  const double step = parse_number(parts[2], "--grid");
  if (!(step > 0.0) || hi < lo) usage_error("--grid needs lo <= hi and step > 0");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> xs;
  for (long i = 0; i < count; ++i) xs.push_back(lo + step * static_cast<double>(i));
  return xs;
}

std::pair<double, double> parse_interval(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) usage_error("--interval expects lo:hi");
  const double lo = parse_number(parts[0], "--interval");
  const double hi = parse_number(parts[1], "--interval");
  if (hi < lo) usage_error("--interval needs lo <= hi");
  return {lo, hi};
}

void require_flag(const std::string& value, const char* flag) {
  if (value.empty()) usage_error(std::string(flag) + " is required");
}

fs::path prepare_out(const std::string& out) {
  require_flag(out, "--out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out + ": " + ec.message());
  return fs::path(out);
}

void emit_json(const Json& j, const std::string& out, const std::string& name) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    io::write_file(prepare_out(out) / name, text);
  }
}

struct Loaded {
  WalkModel model;
  DiagonalState rho;
  bool has_state = false;
};

Loaded load_inputs(const Options& o, bool need_state) {
  require_flag(o.model, "--model");
  Loaded l;
  l.model = io::load_model(o.model);
  validate(l.model);
  if (need_state) require_flag(o.state, "--state");
  if (!o.state.empty()) {
    l.rho = io::load_state(o.state);
    validate(l.rho, l.model);
    l.has_state = true;
  }
  return l;
}

std::string state_hash(const DiagonalState& rho) {
  const std::string dump = io::state_to_json(rho).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return io::hex64(h);
}

// Track ids: "a" for the block chi_a, "a.b" for its b-th minimal enclosure.
Subspace resolve_track(const SpaceDecomposition& dec, const std::string& id) {
  const auto parts = split(id, '.');
  if (parts.empty() || parts.size() > 2) usage_error("--enclosure-track expects BLOCK or BLOCK.ENCLOSURE");
  const long a = parse_integer(parts[0], "--enclosure-track");
  if (a < 0 || static_cast<std::size_t>(a) >= dec.blocks.size()) {
    usage_error("--enclosure-track: no block " + parts[0]);
  }
  const Block& block = dec.blocks[static_cast<std::size_t>(a)];
  if (parts.size() == 1) return block.subspace;
  const long b = parse_integer(parts[1], "--enclosure-track");
  if (b < 0 || b >= block.multiplicity()) usage_error("--enclosure-track: no enclosure " + id);
  return block.minimal_enclosures[static_cast<std::size_t>(b)];
}

std::string ensemble_file(long n) { return "ensemble_n" + std::to_string(n) + ".csv"; }

// Reads a simulate output directory back into an ensemble with snapshots.
struct LoadedSimulation {
  Json manifest;
  TrajectoryEnsemble ensemble;
  std::vector<long> horizons;
};

LoadedSimulation load_simulation(const std::string& dir) {
  LoadedSimulation s;
  const fs::path root(dir);
  const std::string manifest_path = (root / "manifest.json").string();
  try {
    s.manifest = Json::parse(io::read_file(root / "manifest.json"));
    s.horizons = s.manifest.at("config").at("horizons").get<std::vector<long>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, manifest_path + ": " + e.what());
  }
  const int d = s.manifest.value("lattice_dim", 1);
  for (std::size_t hi = 0; hi < s.horizons.size(); ++hi) {
    const long n = s.horizons[hi];
    const fs::path file = root / ensemble_file(n);
    std::stringstream text(io::read_file(file));
    std::string line;
    std::getline(text, line);  // header
    std::vector<Eigen::VectorXi> xs;
    std::vector<Eigen::VectorXi> x0s;
    std::size_t row = 1;
    while (std::getline(text, line)) {
      ++row;
      if (line.empty()) continue;
      const auto cells = split(line, ',');
      if (cells.size() < static_cast<std::size_t>(1 + 2 * d)) {
        throw Error(ErrorCode::Parse, file.string() + ": line " + std::to_string(row) + ": too few columns");
      }
      Eigen::VectorXi x0(d), x(d);
      for (int k = 0; k < d; ++k) {
        x0(k) = static_cast<int>(parse_integer(cells[static_cast<std::size_t>(1 + k)], file.string()));
        x(k) = static_cast<int>(parse_integer(cells[static_cast<std::size_t>(1 + d + k)], file.string()));
      }
      x0s.push_back(x0);
      xs.push_back(x);
    }
    if (hi == 0) {
      s.ensemble.initial_positions = x0s;
    } else if (x0s.size() != s.ensemble.initial_positions.size()) {
      throw Error(ErrorCode::Parse, file.string() + ": trajectory count differs between horizons");
    }
    s.ensemble.snapshots[n] = std::move(xs);
  }
  if (!s.horizons.empty()) s.ensemble.final_positions = s.ensemble.snapshots[s.horizons.back()];
  return s;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& o) {
  require_flag(o.model, "--model");
  const WalkModel model = io::load_model(o.model);
  validate(model);
  Json report;
  report["model"] = o.model;
  report["trace_preservation_deviation"] = trace_preservation_deviation(model);
  report["local_dim"] = model.local_dim();
  report["lattice_dim"] = model.lattice_dim;
  report["branches"] = model.branches();
  const SpaceDecomposition dec = decompose(model);
  report["recurrent_dim"] = dec.recurrent.dim();
  report["transient_dim"] = dec.transient.dim();
  Json dims = Json::array();
  for (const auto& b : dec.blocks) dims.push_back(b.subspace.dim());
  report["block_dims"] = std::move(dims);
  if (!o.state.empty()) {
    const DiagonalState rho = io::load_state(o.state);
    validate(rho, model);
    report["state"] = o.state;
  }
  report["status"] = "ok";
  emit_json(report, o.out, "validate.json");
  return 0;
}

int cmd_analyze(const Options& o) {
  const Loaded in = load_inputs(o, false);
  const SpaceDecomposition dec = decompose(in.model);
  emit_json(io::decomposition_report(in.model, dec, in.has_state ? &in.rho : nullptr), o.out, "decomposition.json");
  return 0;
}

int cmd_clt(const Options& o) {
  const Loaded in = load_inputs(o, true);
  const SpaceDecomposition dec = decompose(in.model);
  const auto horizons = parse_steps(o.steps);
  const auto axis = parse_axis(o.axis, in.model.lattice_dim);
  Json j;
  j["model_hash"] = io::hex64(io::model_hash(in.model));
  j["horizons"] = horizons;
  Json mixtures = Json::array();
  std::vector<MixtureModel> models;
  for (long n : horizons) {
    models.push_back(clt_mixture(in.model, dec, in.rho, n));
    mixtures.push_back(io::mixture_to_json(models.back()));
  }
  j["mixtures"] = std::move(mixtures);
  emit_json(j, o.out, "clt.json");
  if (o.out.empty()) return 0;
  const fs::path out = prepare_out(o.out);
  for (const auto& mix : models) {
    const ProjectedMixture p = project(mix, axis);
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < p.weight.size(); ++k) {
      const double spread = 5.0 * std::max(p.sigma[k], 1e-3);
      lo = std::min(k == 0 ? p.mean[k] - spread : lo, p.mean[k] - spread);
      hi = std::max(k == 0 ? p.mean[k] + spread : hi, p.mean[k] + spread);
    }
    io::CsvWriter csv({"x", "F_mix"});
    for (std::size_t i = 0; i < kCdfPoints; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kCdfPoints - 1);
      csv.add_row({io::format_double(x), io::format_double(p.cdf(x))});
    }
    csv.save(out / ("clt_cdf_n" + std::to_string(mix.horizon) + ".csv"));
  }
  return 0;
}

int cmd_simulate(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded in = load_inputs(o, true);
  const auto horizons = parse_steps(o.steps);
  if (o.traj < 1) usage_error("--traj must be positive");
  const fs::path out = prepare_out(o.out);

  SimConfig config;
  config.steps = horizons.back();
  config.snapshot_steps = horizons;
  config.trajectories = o.traj;
  config.seed = o.seed;
  config.threads = o.threads;
  // Y is stored on the gcd of the horizons so every horizon has a sample.
  long stride = 0;
  for (long n : horizons) stride = std::gcd(stride, n);
  config.Y_snapshot_stride = std::max(1L, stride);
  SpaceDecomposition dec;
  if (!o.tracks.empty()) {
    dec = decompose(in.model);
    for (const auto& id : o.tracks) {
      config.record_Y_for.push_back({id, absorption(in.model, dec, resolve_track(dec, id)).matrix});
    }
  }
  const TrajectoryEnsemble e = run(in.model, in.rho, config);
  const int d = in.model.lattice_dim;

  for (long n : horizons) {
    std::vector<std::string> header{"trajectory"};
    for (int k = 1; k <= d; ++k) header.push_back("x0_" + std::to_string(k));
    for (int k = 1; k <= d; ++k) header.push_back("x_" + std::to_string(k));
    for (const auto& t : config.record_Y_for) header.push_back("Y_" + t.id);
    io::CsvWriter csv(header);
    const auto& xs = e.snapshots.at(n);
    const auto sample = static_cast<std::size_t>(n / config.Y_snapshot_stride);
    for (std::size_t t = 0; t < e.size(); ++t) {
      std::vector<std::string> row{std::to_string(t)};
      for (int k = 0; k < d; ++k) row.push_back(std::to_string(e.initial_positions[t](k)));
      for (int k = 0; k < d; ++k) row.push_back(std::to_string(xs[t](k)));
      for (const auto& tr : config.record_Y_for) row.push_back(io::format_double(e.y_tracks.at(tr.id)[t][sample]));
      csv.add_row(row);
    }
    csv.save(out / ensemble_file(n));
  }

  if (!config.record_Y_for.empty()) {
    io::CsvWriter csv({"track", "n", "hi", "lo", "frac_hi", "frac_lo", "frac_mid"});
    for (const auto& tr : config.record_Y_for) {
      const AbsorptionFractions f = classify_absorption(e, tr.id);
      csv.add_row({tr.id, std::to_string(config.steps), "0.99", "0.01", io::format_double(f.high),
                   io::format_double(f.low), io::format_double(f.middle)});
    }
    csv.save(out / "absorption.csv");
  }

  Json manifest;
  manifest["model"] = o.model;
  manifest["state"] = o.state;
  manifest["model_hash"] = io::hex64(io::model_hash(in.model));
  manifest["state_hash"] = state_hash(in.rho);
  manifest["lattice_dim"] = d;
  Json cfg;
  cfg["horizons"] = horizons;
  cfg["steps"] = config.steps;
  cfg["trajectories"] = config.trajectories;
  cfg["seed"] = config.seed;
  cfg["Y_snapshot_stride"] = config.Y_snapshot_stride;
  Json tracks = Json::array();
  for (const auto& tr : config.record_Y_for) tracks.push_back(tr.id);
  cfg["record_Y_for"] = std::move(tracks);
  cfg["rng"] = "philox4x32-10, key = seed, counter = (trajectory, step)";
  manifest["config"] = std::move(cfg);
  Json files = Json::array();
  for (long n : horizons) files.push_back(ensemble_file(n));
  manifest["files"] = std::move(files);
  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

int cmd_compare(const Options& o) {
  require_flag(o.sim, "--sim");
  const LoadedSimulation sim = load_simulation(o.sim);
  const int d = sim.manifest.value("lattice_dim", 1);
  const auto axis = parse_axis(o.axis, d);

  std::map<long, MixtureModel> predicted;
  if (!o.clt.empty()) {
    Json clt;
    try {
      clt = Json::parse(io::read_file(o.clt));
      for (const auto& m : clt.at("mixtures")) {
        const MixtureModel mix = io::mixture_from_json(m, o.clt);
        predicted[mix.horizon] = mix;
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, o.clt + ": " + e.what());
    }
  } else {
    const Loaded in = load_inputs(o, true);
    if (io::hex64(io::model_hash(in.model)) != sim.manifest.value("model_hash", std::string())) {
      throw Error(ErrorCode::Io, "simulation in " + o.sim + " was produced from a different model");
    }
    const SpaceDecomposition dec = decompose(in.model);
    const auto horizons = o.steps.empty() ? sim.horizons : parse_steps(o.steps);
    for (long n : horizons) predicted[n] = clt_mixture(in.model, dec, in.rho, n);
  }

  std::vector<long> prediction_horizons;
  for (const auto& [n, mix] : predicted) prediction_horizons.push_back(n);
  if (prediction_horizons != sim.horizons) {
    auto show = [](const std::vector<long>& v) {
      std::string s;
      for (long n : v) s += (s.empty() ? "" : ",") + std::to_string(n);
      return s;
    };
    throw Error(ErrorCode::HorizonMismatch,
                "prediction horizons {" + show(prediction_horizons) + "} vs ensemble horizons {" + show(sim.horizons) + "}");
  }

  const fs::path out = prepare_out(o.out);
  io::CsvWriter distances({"n", "N", "w1", "ks"});
  for (long n : sim.horizons) {
    const EmpiricalLaw1D emp = rescale(sim.ensemble, n, axis);
    const ProjectedMixture p = project(predicted.at(n), axis);
    const DistanceReport r = w1_distance(emp, p);
    distances.add_row({std::to_string(n), std::to_string(emp.count()), io::format_double(r.w1), io::format_double(r.ks)});

    io::CsvWriter cdf({"x", "F_emp", "F_mix"});
    for (const CdfRow& row : cdf_table(emp, p, kCdfPoints)) {
      cdf.add_row({io::format_double(row.x), io::format_double(row.f_emp), io::format_double(row.f_mix)});
    }
    cdf.save(out / ("cdf_n" + std::to_string(n) + ".csv"));

    io::CsvWriter hist({"bin_left", "bin_right", "density"});
    for (const HistogramRow& row : histogram(emp, kHistogramBins)) {
      hist.add_row({io::format_double(row.bin_left), io::format_double(row.bin_right), io::format_double(row.density)});
    }
    hist.save(out / ("histogram_n" + std::to_string(n) + ".csv"));
  }
  distances.save(out / "distances.csv");
  std::cout << distances.str();
  return 0;
}

int cmd_ldp(const Options& o) {
  const Loaded in = load_inputs(o, true);
  require_flag(o.grid, "--grid");
  const int d = in.model.lattice_dim;
  const auto axis = parse_axis(o.axis, d);
  const RVector direction = axis ? *axis : RVector::Ones(1);
  const SpaceDecomposition dec = decompose(in.model);
  const fs::path out = prepare_out(o.out);

  std::vector<std::string> header;
  for (int k = 1; k <= d; ++k) header.push_back("x_" + std::to_string(k));
  header.push_back("Lambda");
  for (int k = 1; k <= d; ++k) header.push_back("u*_" + std::to_string(k));
  header.push_back("block_id");
  io::CsvWriter rate(header);
  std::string label;
  std::string caveat;
  Json boundary = Json::array();
  for (double t : parse_grid(o.grid)) {
    const RVector x = t * direction;
    const RateEvaluation r = rate_function(in.model, dec, in.rho, x);
    label = r.label;
    caveat = r.caveat;
    std::vector<std::string> row;
    for (int k = 0; k < d; ++k) row.push_back(io::format_double(x(k)));
    row.push_back(io::format_double(r.value));
    for (int k = 0; k < d; ++k) row.push_back(io::format_double(r.maximizer(k)));
    row.push_back(std::to_string(r.block_id));
    rate.add_row(row);
    if (r.boundary_hit) boundary.push_back(t);
  }
  rate.save(out / "rate.csv");

  Json meta;
  meta["label"] = label;
  if (!caveat.empty()) meta["caveat"] = caveat;
  meta["search_radius"] = kLegendreRadius;
  meta["boundary_hits"] = std::move(boundary);

  if (!o.sim.empty()) {
    require_flag(o.interval, "--interval");
    const auto [lo, hi] = parse_interval(o.interval);
    const LoadedSimulation sim = load_simulation(o.sim);
    std::vector<long> horizons;
    for (long n : sim.horizons) {
      if (n > 0) horizons.push_back(n);
    }
    const double bound = d == 1 ? -rate_infimum(in.model, dec, in.rho, lo, hi) : std::nan("");
    io::CsvWriter ldp({"n", "log_freq_over_n", "rate_bound"});
    for (const LdpRow& row : ldp_estimate(sim.ensemble, horizons, lo, hi, bound, axis)) {
      ldp.add_row({std::to_string(row.n), io::format_double(row.log_freq_over_n), io::format_double(row.rate_bound)});
    }
    ldp.save(out / "ldp.csv");
    meta["interval"] = {lo, hi};
  }
  io::write_file(out / "rate.json", meta.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogeneous open quantum random walks: structure, asymptotics and simulation"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* sub, bool state) {
    sub->add_option("--model", o.model, "Model JSON file");
    if (state) sub->add_option("--state", o.state, "Initial state JSON file");
    sub->add_option("--out", o.out, "Output directory");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check normalization and structure of a model");
  add_model(validate_cmd, true);
  auto* analyze = app.add_subcommand("analyze", "Recurrent/transient split, blocks, absorption operators");
  add_model(analyze, true);
  auto* clt = app.add_subcommand("clt", "Gaussian-mixture prediction at given horizons");
  add_model(clt, true);
  clt->add_option("--steps", o.steps, "Horizons n1,n2,...");
  clt->add_option("--axis", o.axis, "Projection axis a1,...,ad");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trajectories");
  add_model(simulate, true);
  simulate->add_option("--steps", o.steps, "Horizons n1,n2,... (the largest is the run length)");
  simulate->add_option("--traj", o.traj, "Number of trajectories");
  simulate->add_option("--seed", o.seed, "RNG seed");
  simulate->add_option("--enclosure-track", o.tracks, "Record Y for block ID (or ID.ENCLOSURE)");
  simulate->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  auto* compare = app.add_subcommand("compare", "W1/KS between a simulation and the predicted mixture");
  add_model(compare, true);
  compare->add_option("--sim", o.sim, "Directory written by simulate");
  compare->add_option("--clt", o.clt, "clt.json to compare against instead of --model/--state");
  compare->add_option("--steps", o.steps, "Prediction horizons (must match the simulation)");
  compare->add_option("--axis", o.axis, "Projection axis a1,...,ad");
  auto* ldp = app.add_subcommand("ldp", "Rate-function sweep and empirical decay rates");
  add_model(ldp, true);
  ldp->add_option("--grid", o.grid, "lo:hi:step along the axis");
  ldp->add_option("--axis", o.axis, "Direction a1,...,ad of the sweep");
  ldp->add_option("--sim", o.sim, "Directory written by simulate");
  ldp->add_option("--interval", o.interval, "lo:hi interval B for (X_n - X_0)/n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(o);
    if (analyze->parsed()) return cmd_analyze(o);
    if (clt->parsed()) return cmd_clt(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (compare->parsed()) return cmd_compare(o);
    if (ldp->parsed()) return cmd_ldp(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
