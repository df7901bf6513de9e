#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "oqrw/asymptotics.hpp"
#include "oqrw/structure.hpp"

namespace oqrw::io {

using Json = nlohmann::ordered_json;

// Models:  {"lattice_dim": d, "shifts": [[...], ...], "kraus": [M_1, ...]}
// States:  {"entries": [{"site": [...], "matrix": M}, ...]}
// A matrix M is a list of rows; an entry is a number or a [re, im] pair.
// Parse failures throw Error(Parse) naming the line/column or the field path.
WalkModel parse_model(const std::string& text, const std::string& source = "<model>");
DiagonalState parse_state(const std::string& text, const std::string& source = "<state>");
WalkModel load_model(const std::filesystem::path& path);
DiagonalState load_state(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

Json matrix_to_json(const CMatrix& m);
Json model_to_json(const WalkModel& model);
Json state_to_json(const DiagonalState& rho);
Json subspace_to_json(const Subspace& s);
Json mixture_to_json(const MixtureModel& mixture);
MixtureModel mixture_from_json(const Json& j, const std::string& source = "<mixture>");

// R, T, blocks with their minimal enclosures and absorption operators, and
// the absorption weights when a state is given.
Json decomposition_report(const WalkModel& model, const SpaceDecomposition& dec, const DiagonalState* rho = nullptr);

// FNV-1a over the canonical JSON dump of the model.
std::uint64_t model_hash(const WalkModel& model);
std::string hex64(std::uint64_t v);

// Shortest round-trip decimal; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::string buffer_;
};

}  // namespace oqrw::io
