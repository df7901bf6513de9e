#include "oqrw/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "oqrw/error.hpp"

namespace oqrw::io {
namespace {

[[noreturn]] void field_error(const std::string& source, const std::string& path, const std::string& what) {
  throw Error(ErrorCode::Parse, source + ": field '" + path + "': " + what);
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::Parse, source + ": line " + std::to_string(line) + ", column " + std::to_string(column) +
                                      ": malformed JSON");
  }
}

const Json& require(const Json& obj, const char* key, const std::string& source, const std::string& path) {
  if (!obj.is_object()) field_error(source, path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(source, path.empty() ? key : path + "." + key, "missing");
  return *it;
}

Complex parse_complex(const Json& j, const std::string& source, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  field_error(source, path, "expected a number or a [re, im] pair");
}

CMatrix parse_matrix(const Json& j, const std::string& source, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(source, path, "expected a nonempty list of rows");
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) field_error(source, path + "[0]", "expected a nonempty row");
  const auto cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) field_error(source, rp, "ragged row");
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)], source, rp + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

Eigen::VectorXi parse_int_vector(const Json& j, const std::string& source, const std::string& path) {
  if (!j.is_array()) field_error(source, path, "expected a list of integers");
  Eigen::VectorXi v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) field_error(source, path + "[" + std::to_string(i) + "]", "expected an integer");
    v(static_cast<Index>(i)) = j[i].get<int>();
  }
  return v;
}

}  // namespace

WalkModel parse_model(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  WalkModel model;
  const Json& d = require(j, "lattice_dim", source, "");
  if (!d.is_number_integer()) field_error(source, "lattice_dim", "expected an integer");
  model.lattice_dim = d.get<int>();
  const Json& shifts = require(j, "shifts", source, "");
  const Json& kraus = require(j, "kraus", source, "");
  if (!shifts.is_array()) field_error(source, "shifts", "expected a list");
  if (!kraus.is_array()) field_error(source, "kraus", "expected a list");
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    model.shifts.push_back(parse_int_vector(shifts[i], source, "shifts[" + std::to_string(i) + "]"));
  }
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    model.kraus.push_back(parse_matrix(kraus[i], source, "kraus[" + std::to_string(i) + "]"));
  }
  return model;
}

DiagonalState parse_state(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  const Json& entries = require(j, "entries", source, "");
  if (!entries.is_array()) field_error(source, "entries", "expected a list");
  DiagonalState rho;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string p = "entries[" + std::to_string(i) + "]";
    DiagonalState::Entry e;
    e.site = parse_int_vector(require(entries[i], "site", source, p), source, p + ".site");
    e.matrix = parse_matrix(require(entries[i], "matrix", source, p), source, p + ".matrix");
    rho.entries.push_back(std::move(e));
  }
  return rho;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

WalkModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path), path.string()); }
DiagonalState load_state(const std::filesystem::path& path) { return parse_state(read_file(path), path.string()); }

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json model_to_json(const WalkModel& model) {
  Json j;
  j["lattice_dim"] = model.lattice_dim;
  Json shifts = Json::array();
  for (const auto& s : model.shifts) shifts.push_back(std::vector<int>(s.data(), s.data() + s.size()));
  j["shifts"] = std::move(shifts);
  Json kraus = Json::array();
  for (const auto& k : model.kraus) kraus.push_back(matrix_to_json(k));
  j["kraus"] = std::move(kraus);
  return j;
}

Json state_to_json(const DiagonalState& rho) {
  Json entries = Json::array();
  for (const auto& e : rho.entries) {
    Json entry;
    entry["site"] = std::vector<int>(e.site.data(), e.site.data() + e.site.size());
    entry["matrix"] = matrix_to_json(e.matrix);
    entries.push_back(std::move(entry));
  }
  Json j;
  j["entries"] = std::move(entries);
  return j;
}

Json subspace_to_json(const Subspace& s) {
  Json j;
  j["dim"] = s.dim();
  j["basis"] = matrix_to_json(s.basis());
  return j;
}

Json mixture_to_json(const MixtureModel& mixture) {
  Json comps = Json::array();
  for (std::size_t k = 0; k < mixture.components.size(); ++k) {
    const auto& c = mixture.components[k];
    const RVector mean = mixture.mean_at_horizon(k);
    Json comp;
    comp["weight"] = c.weight;
    comp["block_id"] = c.block_id;
    comp["drift"] = std::vector<double>(c.gaussian.mean_rate.data(), c.gaussian.mean_rate.data() + c.gaussian.mean_rate.size());
    comp["mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
    Json cov = Json::array();
    for (Index r = 0; r < c.gaussian.covariance.rows(); ++r) {
      std::vector<double> row;
      for (Index q = 0; q < c.gaussian.covariance.cols(); ++q) row.push_back(c.gaussian.covariance(r, q));
      cov.push_back(row);
    }
    comp["covariance"] = std::move(cov);
    comps.push_back(std::move(comp));
  }
  Json j;
  j["horizon"] = mixture.horizon;
  j["components"] = std::move(comps);
  return j;
}

MixtureModel mixture_from_json(const Json& j, const std::string& source) {
  MixtureModel mix;
  const Json& horizon = require(j, "horizon", source, "");
  if (!horizon.is_number_integer()) field_error(source, "horizon", "expected an integer");
  mix.horizon = horizon.get<long>();
  const Json& comps = require(j, "components", source, "");
  if (!comps.is_array()) field_error(source, "components", "expected a list");
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const std::string p = "components[" + std::to_string(k) + "]";
    try {
      MixtureComponent c;
      c.weight = require(comps[k], "weight", source, p).get<double>();
      c.block_id = require(comps[k], "block_id", source, p).get<std::size_t>();
      const auto drift = require(comps[k], "drift", source, p).get<std::vector<double>>();
      const auto cov = require(comps[k], "covariance", source, p).get<std::vector<std::vector<double>>>();
      c.gaussian.mean_rate = Eigen::Map<const RVector>(drift.data(), static_cast<Index>(drift.size()));
      const auto d = static_cast<Index>(drift.size());
      c.gaussian.covariance = RMatrix::Zero(d, d);
      if (static_cast<Index>(cov.size()) != d) field_error(source, p + ".covariance", "wrong size");
      for (Index r = 0; r < d; ++r) {
        if (static_cast<Index>(cov[static_cast<std::size_t>(r)].size()) != d) {
          field_error(source, p + ".covariance", "wrong size");
        }
        for (Index q = 0; q < d; ++q) c.gaussian.covariance(r, q) = cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)];
      }
      mix.components.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      field_error(source, p, e.what());
    }
  }
  return mix;
}

Json decomposition_report(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState* rho) {
  Json j;
  j["local_dim"] = model.local_dim();
  j["lattice_dim"] = model.lattice_dim;
  j["recurrent"] = subspace_to_json(dec.recurrent);
  j["transient"] = subspace_to_json(dec.transient);
  std::optional<AbsorptionWeights> w;
  if (rho != nullptr) w = weights(model, dec, *rho);
  CMatrix total = CMatrix::Zero(model.local_dim(), model.local_dim());
  Json blocks = Json::array();
  for (std::size_t a = 0; a < dec.blocks.size(); ++a) {
    const Block& b = dec.blocks[a];
    Json jb;
    jb["id"] = std::to_string(a);
    jb["dim"] = b.subspace.dim();
    jb["multiplicity"] = b.multiplicity();
    jb["basis"] = matrix_to_json(b.subspace.basis());
    const AbsorptionOperator abs = absorption(model, dec, b.subspace);
    total += abs.matrix;
    jb["absorption"] = matrix_to_json(abs.matrix);
    if (w) jb["weight"] = w->block[a];
    Json encl = Json::array();
    for (std::size_t e = 0; e < b.minimal_enclosures.size(); ++e) {
      Json je;
      je["id"] = std::to_string(a) + "." + std::to_string(e);
      je["basis"] = matrix_to_json(b.minimal_enclosures[e].basis());
      je["invariant_state"] = matrix_to_json(b.enclosure_states[e]);
      if (w) je["weight"] = w->enclosure[a][e];
      encl.push_back(std::move(je));
    }
    jb["minimal_enclosures"] = std::move(encl);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  j["absorption_sum_deviation"] = (total - CMatrix::Identity(model.local_dim(), model.local_dim())).norm();
  return j;
}

std::uint64_t model_hash(const WalkModel& model) {
  const std::string dump = model_to_json(model).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { add_row(header); }

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error(ErrorCode::DimensionMismatch, "CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

std::string CsvWriter::str() const { return buffer_; }

void CsvWriter::save(const std::filesystem::path& path) const { write_file(path, buffer_); }

}  // namespace oqrw::io
