#include <map>
#include <optional>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oqrw/empirics.hpp"
#include "oqrw/io.hpp"

namespace py = pybind11;
using namespace oqrw;

namespace {

// Positions as an (N, d) int array.
py::array_t<int> positions(const std::vector<Eigen::VectorXi>& xs, int d) {
  py::array_t<int> out({static_cast<py::ssize_t>(xs.size()), static_cast<py::ssize_t>(d)});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t t = 0; t < xs.size(); ++t) {
    for (int k = 0; k < d; ++k) view(static_cast<py::ssize_t>(t), k) = xs[t](k);
  }
  return out;
}

const Block& block_at(const SpaceDecomposition& dec, std::size_t block) {
  if (block >= dec.blocks.size()) throw Error(ErrorCode::InvalidState, "no block " + std::to_string(block));
  return dec.blocks[block];
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Homogeneous open quantum random walks: structure, asymptotics and simulation";

  // Messages start with the error code name, e.g. "NotTracePreserving: ...".
  py::register_exception<Error>(m, "OqrwError", PyExc_RuntimeError);

  py::class_<WalkModel>(m, "Model")
      .def(py::init([](std::vector<CMatrix> kraus, std::vector<Eigen::VectorXi> shifts) {
             WalkModel w;
             w.lattice_dim = shifts.empty() ? 1 : static_cast<int>(shifts.front().size());
             w.kraus = std::move(kraus);
             w.shifts = std::move(shifts);
             return w;
           }),
           py::arg("kraus"), py::arg("shifts"))
      .def_static("load", [](const std::string& path) { return io::load_model(path); })
      .def_static("from_json", [](const std::string& text) { return io::parse_model(text); })
      .def("to_json", [](const WalkModel& w) { return io::model_to_json(w).dump(); })
      .def("validate", [](const WalkModel& w) { validate(w); })
      .def("hash", [](const WalkModel& w) { return io::hex64(io::model_hash(w)); })
      .def_property_readonly("local_dim", &WalkModel::local_dim)
      .def_property_readonly("lattice_dim", [](const WalkModel& w) { return w.lattice_dim; })
      .def_readonly("kraus", &WalkModel::kraus)
      .def_readonly("shifts", &WalkModel::shifts);

  py::class_<DiagonalState>(m, "State")
      .def_static("load", [](const std::string& path) { return io::load_state(path); })
      .def_static("from_json", [](const std::string& text) { return io::parse_state(text); })
      .def_static("localized", &localized_state, py::arg("rho0"), py::arg("lattice_dim") = 1)
      .def("to_json", [](const DiagonalState& s) { return io::state_to_json(s).dump(); })
      .def("validate", [](const DiagonalState& s, const WalkModel& w) { validate(s, w); })
      .def("local_marginal", [](const DiagonalState& s, Index h) { return s.local_marginal(h); });

  m.def(
      "analyze",
      [](const WalkModel& w, const DiagonalState* rho) {
        return io::decomposition_report(w, decompose(w), rho).dump();
      },
      py::arg("model"), py::arg("state") = nullptr, "Decomposition report as JSON text");

  m.def(
      "absorption",
      [](const WalkModel& w, std::size_t block, std::optional<std::size_t> enclosure) {
        const SpaceDecomposition dec = decompose(w);
        const Block& b = block_at(dec, block);
        if (!enclosure) return absorption(w, dec, b.subspace).matrix;
        if (*enclosure >= b.minimal_enclosures.size()) {
          throw Error(ErrorCode::InvalidState, "no enclosure " + std::to_string(*enclosure));
        }
        return absorption(w, dec, b.minimal_enclosures[*enclosure]).matrix;
      },
      py::arg("model"), py::arg("block"), py::arg("enclosure") = std::nullopt);

  m.def(
      "clt",
      [](const WalkModel& w, const DiagonalState& rho, long horizon) {
        return io::mixture_to_json(clt_mixture(w, decompose(w), rho, horizon)).dump();
      },
      py::arg("model"), py::arg("state"), py::arg("horizon"), "Gaussian mixture as JSON text");

  m.def(
      "rate",
      [](const WalkModel& w, const DiagonalState& rho, const RVector& x) {
        const RateEvaluation r = rate_function(w, decompose(w), rho, x);
        py::dict out;
        out["value"] = r.value;
        out["label"] = r.label;
        out["boundary_hit"] = r.boundary_hit;
        out["block_id"] = r.block_id;
        out["maximizer"] = r.maximizer;
        out["caveat"] = r.caveat;
        return out;
      },
      py::arg("model"), py::arg("state"), py::arg("x"));

  m.def(
      "simulate",
      [](const WalkModel& w, const DiagonalState& rho, long steps, long trajectories, std::uint64_t seed,
         std::vector<long> snapshots, std::map<std::string, CMatrix> tracks, unsigned threads) {
        SimConfig c;
        c.steps = steps;
        c.trajectories = trajectories;
        c.seed = seed;
        c.snapshot_steps = std::move(snapshots);
        c.threads = threads;
        c.Y_snapshot_stride = std::max(1L, steps);
        for (auto& [id, a] : tracks) c.record_Y_for.push_back({id, a});
        TrajectoryEnsemble e;
        {
          py::gil_scoped_release release;
          e = run(w, rho, c);
        }
        py::dict snaps;
        for (const auto& [n, xs] : e.snapshots) snaps[py::int_(n)] = positions(xs, w.lattice_dim);
        py::dict y;
        for (const auto& [id, v] : e.y_final) y[py::str(id)] = py::array_t<double>(v.size(), v.data());
        py::dict out;
        out["initial"] = positions(e.initial_positions, w.lattice_dim);
        out["snapshots"] = snaps;
        out["y_final"] = y;
        return out;
      },
      py::arg("model"), py::arg("state"), py::arg("steps"), py::arg("trajectories"), py::arg("seed"),
      py::arg("snapshots") = std::vector<long>{}, py::arg("tracks") = std::map<std::string, CMatrix>{},
      py::arg("threads") = 1u);

  m.def(
      "w1",
      [](std::vector<double> samples, std::vector<double> weight, std::vector<double> mean,
         std::vector<double> sigma) {
        const DistanceReport r =
            w1_distance(EmpiricalLaw1D::from_samples(std::move(samples), 0), ProjectedMixture{weight, mean, sigma});
        return std::make_pair(r.w1, r.ks);
      },
      py::arg("samples"), py::arg("weight"), py::arg("mean"), py::arg("sigma"),
      "(W1, KS) between samples and a scalar Gaussian mixture");
}
