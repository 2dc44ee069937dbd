#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lbmo {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }

/// Torus fields wrap in both directions and use periodic distances; window
/// fields sample a plane function on a finite box and use Euclidean ones.
enum class Domain { torus, window };

/// Uniform lattice of nx*ny nodes on [ox, ox+lx) x [oy, oy+ly).
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double lx = kTwoPi;
  double ly = kTwoPi;
  double ox = 0.0;
  double oy = 0.0;
  Domain domain = Domain::torus;

  static GridSpec torus(int nx, int ny, double lx = kTwoPi, double ly = kTwoPi);
  static GridSpec window(int nx, int ny, Point origin, double lx, double ly);

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double h_max() const { return std::max(hx(), hy()); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  Point node(int i, int j) const { return {ox + i * hx(), oy + j * hy()}; }
  Point center() const { return {ox + 0.5 * lx, oy + 0.5 * ly}; }
  bool is_torus() const { return domain == Domain::torus; }
  bool power_of_two() const;

  /// Throws lbmo::Error unless nx, ny >= 8 and the lengths are positive.
  void validate() const;

  /// Short stable identifier used in report metadata.
  std::string id() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

/// Disc B(center, radius).
struct Ball {
  Point center;
  double radius = 1.0;
};

/// Sampled scalar on a GridSpec, row-major: values[j*nx + i]. Immutable;
/// every value is finite.
class ScalarField2D {
 public:
  ScalarField2D(GridSpec grid, std::vector<double> values);
  static ScalarField2D zeros(GridSpec grid);
  static ScalarField2D constant(GridSpec grid, double c);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.nx) + static_cast<std::size_t>(i);
  }
  std::size_t size() const { return values_.size(); }

  double mean() const;
  double max_abs() const;

  ScalarField2D scaled(double c) const;
  ScalarField2D plus(const ScalarField2D& other) const;
  ScalarField2D minus_mean() const;
  /// Circular shift: result(i, j) = this(i - di, j - dj).
  ScalarField2D shifted(int di, int dj) const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Two-component field on one grid; same layout as ScalarField2D.
class VectorField2D {
 public:
  VectorField2D(GridSpec grid, std::vector<double> u1, std::vector<double> u2);
  static VectorField2D zeros(GridSpec grid);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> u1() const { return u1_; }
  std::span<const double> u2() const { return u2_; }
  ScalarField2D component(int c) const;
  double max_magnitude() const;

 private:
  GridSpec grid_;
  std::vector<double> u1_;
  std::vector<double> u2_;
};

}  // namespace lbmo
