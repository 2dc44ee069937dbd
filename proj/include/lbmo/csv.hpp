#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lbmo::csv {

/// Shortest-roundtrip-safe text for a double ("%.17g"; "inf"/"nan" spelled out).
std::string num(double v);

/// A header plus string cells; enough for the flat numeric tables the
/// scenarios emit.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::size_t column(const std::string& name) const;  // throws if absent
  std::vector<double> numeric(const std::string& name) const;
  std::vector<std::string> text(const std::string& name) const;

  std::string str() const;
  void write(const std::filesystem::path& path) const;
  static Table read(const std::filesystem::path& path);
  static Table parse(const std::string& text);
};

}  // namespace lbmo::csv
