#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lbmo/field.hpp"

namespace lbmo::f2d {

// F2D record: one JSON header line
//   {"nx":..,"ny":..,"lx":..,"ly":..,"ox":..,"oy":..,"dtype":"f64","layout":"row-major"}\n
// followed by nx*ny little-endian IEEE-754 doubles. Vector fields are two
// consecutive records in one file.

void write_record(std::ostream& os, const GridSpec& grid, std::span<const double> values);

struct Record {
  GridSpec grid;
  std::vector<double> values;
};

/// Reads one record; returns nullopt at clean end of stream. The header
/// carries no domain tag: a zero origin reads as a torus, anything else as
/// a window, unless `domain` overrides it.
std::optional<Record> read_record(std::istream& is, std::optional<Domain> domain = std::nullopt);

void write_scalar(const std::filesystem::path& path, const ScalarField2D& field);
void write_vector(const std::filesystem::path& path, const VectorField2D& field);
ScalarField2D read_scalar(const std::filesystem::path& path, std::optional<Domain> domain = std::nullopt);
VectorField2D read_vector(const std::filesystem::path& path, std::optional<Domain> domain = std::nullopt);

/// All records in a file, in order.
std::vector<Record> read_all(const std::filesystem::path& path, std::optional<Domain> domain = std::nullopt);

}  // namespace lbmo::f2d
