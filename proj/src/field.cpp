#include "lbmo/field.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lbmo/error.hpp"

namespace lbmo {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_finite(const GridSpec& g, std::span<const double> v, const char* what) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) {
      const auto i = static_cast<int>(k % static_cast<std::size_t>(g.nx));
      const auto j = static_cast<int>(k / static_cast<std::size_t>(g.nx));
      std::ostringstream os;
      os << what << ": non-finite value at node (" << i << ", " << j << ")";
      throw Error(os.str());
    }
  }
}

}  // namespace

GridSpec GridSpec::torus(int nx, int ny, double lx, double ly) {
  GridSpec g{nx, ny, lx, ly, 0.0, 0.0, Domain::torus};
  g.validate();
  return g;
}

GridSpec GridSpec::window(int nx, int ny, Point origin, double lx, double ly) {
  GridSpec g{nx, ny, lx, ly, origin.x, origin.y, Domain::window};
  g.validate();
  return g;
}

bool GridSpec::power_of_two() const { return is_pow2(nx) && is_pow2(ny); }

void GridSpec::validate() const {
  if (nx < 8 || ny < 8) {
    throw Error("grid: nx and ny must be >= 8 (got " + std::to_string(nx) + "x" + std::to_string(ny) + ")");
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw Error("grid: side lengths must be finite and positive");
  }
  if (!std::isfinite(ox) || !std::isfinite(oy)) {
    throw Error("grid: origin offset must be finite");
  }
}

std::string GridSpec::id() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s:%dx%d:%.17g,%.17g@%.17g,%.17g", to_string(domain).c_str(), nx, ny, lx, ly, ox,
                oy);
  return buf;
}

std::string to_string(Domain d) { return d == Domain::torus ? "torus" : "window"; }

Domain domain_from_string(const std::string& s) {
  if (s == "torus") return Domain::torus;
  if (s == "window") return Domain::window;
  throw Error("unknown domain '" + s + "' (expected torus or window)");
}

ScalarField2D::ScalarField2D(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) {
    throw Error("scalar field: expected " + std::to_string(grid_.size()) + " values, got " +
                std::to_string(values_.size()));
  }
  check_finite(grid_, values_, "scalar field");
}

ScalarField2D ScalarField2D::zeros(GridSpec grid) { return constant(grid, 0.0); }

ScalarField2D ScalarField2D::constant(GridSpec grid, double c) {
  grid.validate();
  return ScalarField2D(grid, std::vector<double>(grid.size(), c));
}

double ScalarField2D::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double ScalarField2D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField2D ScalarField2D::scaled(double c) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= c;
  return ScalarField2D(grid_, std::move(out));
}

ScalarField2D ScalarField2D::plus(const ScalarField2D& other) const {
  if (!(other.grid_ == grid_)) throw Error("scalar field: grid mismatch in plus()");
  std::vector<double> out(values_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += other.values_[k];
  return ScalarField2D(grid_, std::move(out));
}

ScalarField2D ScalarField2D::minus_mean() const {
  const double m = mean();
  std::vector<double> out(values_);
  for (double& v : out) v -= m;
  return ScalarField2D(grid_, std::move(out));
}

ScalarField2D ScalarField2D::shifted(int di, int dj) const {
  const int nx = grid_.nx;
  const int ny = grid_.ny;
  std::vector<double> out(values_.size());
  for (int j = 0; j < ny; ++j) {
    const int sj = ((j - dj) % ny + ny) % ny;
    for (int i = 0; i < nx; ++i) {
      const int si = ((i - di) % nx + nx) % nx;
      out[index(i, j)] = values_[index(si, sj)];
    }
  }
  return ScalarField2D(grid_, std::move(out));
}

VectorField2D::VectorField2D(GridSpec grid, std::vector<double> u1, std::vector<double> u2)
    : grid_(grid), u1_(std::move(u1)), u2_(std::move(u2)) {
  grid_.validate();
  if (u1_.size() != grid_.size() || u2_.size() != grid_.size()) {
    throw Error("vector field: component length does not match grid");
  }
  check_finite(grid_, u1_, "vector field u1");
  check_finite(grid_, u2_, "vector field u2");
}

VectorField2D VectorField2D::zeros(GridSpec grid) {
  grid.validate();
  return VectorField2D(grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0));
}

ScalarField2D VectorField2D::component(int c) const {
  return ScalarField2D(grid_, c == 0 ? u1_ : u2_);
}

double VectorField2D::max_magnitude() const {
  double m = 0.0;
  for (std::size_t k = 0; k < u1_.size(); ++k) m = std::max(m, std::hypot(u1_[k], u2_[k]));
  return m;
}

}  // namespace lbmo
