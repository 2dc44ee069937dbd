#include "lbmo/f2d.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "lbmo/error.hpp"

namespace lbmo::f2d {

namespace {

static_assert(sizeof(double) == 8);

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return v;
}

}  // namespace

void write_record(std::ostream& os, const GridSpec& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw Error("f2d: value count does not match grid");
  nlohmann::ordered_json header;
  header["nx"] = grid.nx;
  header["ny"] = grid.ny;
  header["lx"] = grid.lx;
  header["ly"] = grid.ly;
  header["ox"] = grid.ox;
  header["oy"] = grid.oy;
  header["dtype"] = "f64";
  header["layout"] = "row-major";
  os << header.dump() << '\n';
  std::vector<std::uint64_t> raw(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) raw[k] = to_little(std::bit_cast<std::uint64_t>(values[k]));
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
  if (!os) throw Error("f2d: write failed");
}

std::optional<Record> read_record(std::istream& is, std::optional<Domain> domain) {
  std::string line;
  if (!std::getline(is, line)) return std::nullopt;
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("f2d: malformed header: ") + e.what());
  }
  try {
    if (header.at("dtype").get<std::string>() != "f64") throw Error("f2d: unsupported dtype");
    if (header.at("layout").get<std::string>() != "row-major") throw Error("f2d: unsupported layout");
    GridSpec g;
    g.nx = header.at("nx").get<int>();
    g.ny = header.at("ny").get<int>();
    g.lx = header.at("lx").get<double>();
    g.ly = header.at("ly").get<double>();
    g.ox = header.at("ox").get<double>();
    g.oy = header.at("oy").get<double>();
    g.domain = domain.value_or((g.ox == 0.0 && g.oy == 0.0) ? Domain::torus : Domain::window);
    g.validate();
    std::vector<std::uint64_t> raw(g.size());
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
    if (static_cast<std::size_t>(is.gcount()) != raw.size() * 8) throw Error("f2d: truncated payload");
    std::vector<double> values(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) values[k] = std::bit_cast<double>(to_little(raw[k]));
    return Record{g, std::move(values)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("f2d: bad header field: ") + e.what());
  }
}

void write_scalar(const std::filesystem::path& path, const ScalarField2D& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("f2d: cannot open " + path.string() + " for writing");
  write_record(os, field.grid(), field.values());
}

void write_vector(const std::filesystem::path& path, const VectorField2D& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("f2d: cannot open " + path.string() + " for writing");
  write_record(os, field.grid(), field.u1());
  write_record(os, field.grid(), field.u2());
}

std::vector<Record> read_all(const std::filesystem::path& path, std::optional<Domain> domain) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("f2d: cannot open " + path.string());
  std::vector<Record> out;
  while (auto rec = read_record(is, domain)) out.push_back(std::move(*rec));
  return out;
}

ScalarField2D read_scalar(const std::filesystem::path& path, std::optional<Domain> domain) {
  auto recs = read_all(path, domain);
  if (recs.empty()) throw Error("f2d: no record in " + path.string());
  return ScalarField2D(recs.front().grid, std::move(recs.front().values));
}

VectorField2D read_vector(const std::filesystem::path& path, std::optional<Domain> domain) {
  auto recs = read_all(path, domain);
  if (recs.size() < 2) throw Error("f2d: vector file needs two records: " + path.string());
  if (!(recs[0].grid == recs[1].grid)) throw Error("f2d: vector components on different grids");
  return VectorField2D(recs[0].grid, std::move(recs[0].values), std::move(recs[1].values));
}

}  // namespace lbmo::f2d
