#include "lbmo/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "lbmo/error.hpp"
#include "lbmo/parallel.hpp"

namespace lbmo {

namespace {

// Lattice coordinates closer than this to an integer snap onto it, so that
// evaluation at a node returns the node value exactly.
constexpr double kSnap = 1e-10;

struct Stencil {
  std::size_t k00, k10, k01, k11;
  double fx, fy;
};

void locate(double t, int n, int& i0, double& frac) {
  double fl = std::floor(t);
  frac = t - fl;
  if (frac > 1.0 - kSnap) {
    fl += 1.0;
    frac = 0.0;
  } else if (frac < kSnap) {
    frac = 0.0;
  }
  const long wrapped = static_cast<long>(fl) % n;
  i0 = static_cast<int>(wrapped < 0 ? wrapped + n : wrapped);
}

Stencil stencil(const GridSpec& g, Point p) {
  int i0 = 0;
  int j0 = 0;
  Stencil s{};
  locate((p.x - g.ox) / g.hx(), g.nx, i0, s.fx);
  locate((p.y - g.oy) / g.hy(), g.ny, j0, s.fy);
  const int i1 = (i0 + 1) % g.nx;
  const int j1 = (j0 + 1) % g.ny;
  const auto row0 = static_cast<std::size_t>(j0) * static_cast<std::size_t>(g.nx);
  const auto row1 = static_cast<std::size_t>(j1) * static_cast<std::size_t>(g.nx);
  s.k00 = row0 + static_cast<std::size_t>(i0);
  s.k10 = row0 + static_cast<std::size_t>(i1);
  s.k01 = row1 + static_cast<std::size_t>(i0);
  s.k11 = row1 + static_cast<std::size_t>(i1);
  return s;
}

double blend(const Stencil& s, std::span<const double> v) {
  if (s.fx == 0.0 && s.fy == 0.0) return v[s.k00];
  const double lower = (1.0 - s.fx) * v[s.k00] + s.fx * v[s.k10];
  const double upper = (1.0 - s.fx) * v[s.k01] + s.fx * v[s.k11];
  return (1.0 - s.fy) * lower + s.fy * upper;
}

double bump(double q2) { return q2 < 1.0 ? std::exp(-1.0 / (1.0 - q2)) : 0.0; }

}  // namespace

ScalarField2D sample_analytic(const GridSpec& grid, const std::function<double(Point)>& fn) {
  grid.validate();
  std::vector<double> values(grid.size());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Point x = grid.node(i, j);
      const double v = fn(x);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "sample_analytic: non-finite value at node (" << i << ", " << j << ") = (" << x.x << ", " << x.y << ")";
        throw Error(os.str());
      }
      values[static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.nx) + static_cast<std::size_t>(i)] = v;
    }
  }
  return ScalarField2D(grid, std::move(values));
}

VectorField2D sample_analytic(const GridSpec& grid, const std::function<Point(Point)>& fn) {
  grid.validate();
  std::vector<double> u1(grid.size());
  std::vector<double> u2(grid.size());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Point x = grid.node(i, j);
      const Point v = fn(x);
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
        std::ostringstream os;
        os << "sample_analytic: non-finite vector at node (" << i << ", " << j << ")";
        throw Error(os.str());
      }
      const auto k = static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.nx) + static_cast<std::size_t>(i);
      u1[k] = v.x;
      u2[k] = v.y;
    }
  }
  return VectorField2D(grid, std::move(u1), std::move(u2));
}

double interp_bilinear(const ScalarField2D& field, Point p) {
  return blend(stencil(field.grid(), p), field.values());
}

Point interp_bilinear(const VectorField2D& field, Point p) {
  const Stencil s = stencil(field.grid(), p);
  return {blend(s, field.u1()), blend(s, field.u2())};
}

double lp_norm(const ScalarField2D& field, double p) {
  if (std::isnan(p) || p < 1.0) throw Error("lp_norm: p must be >= 1 or infinity");
  const auto v = field.values();
  if (std::isinf(p)) return field.max_abs();
  const double cell = field.grid().hx() * field.grid().hy();
  double sum = 0.0;
  if (p == 1.0) {
    for (double x : v) sum += std::abs(x);
    return sum * cell;
  }
  if (p == 2.0) {
    for (double x : v) sum += x * x;
    return std::sqrt(sum * cell);
  }
  for (double x : v) sum += std::pow(std::abs(x), p);
  return std::pow(sum * cell, 1.0 / p);
}

int max_mollifier_n(const GridSpec& grid) {
  return static_cast<int>(std::floor(1.0 / (2.0 * grid.h_max())));
}

ScalarField2D mollify(const ScalarField2D& field, int n) {
  const GridSpec& g = field.grid();
  if (n < 1) throw Error("mollify: n must be a positive integer");
  const int n_max = max_mollifier_n(g);
  if (n > n_max) {
    throw Error("mollify: n = " + std::to_string(n) + " leaves fewer than two cells under the kernel; max admissible n is " +
                std::to_string(n_max));
  }
  const double hx = g.hx();
  const double hy = g.hy();
  const int rx = static_cast<int>(std::ceil(1.0 / (n * hx)));
  const int ry = static_cast<int>(std::ceil(1.0 / (n * hy)));

  struct Tap {
    int di, dj;
    double w;
  };
  std::vector<Tap> taps;
  double mass = 0.0;
  for (int dj = -ry; dj <= ry; ++dj) {
    for (int di = -rx; di <= rx; ++di) {
      const double qx = n * di * hx;
      const double qy = n * dj * hy;
      const double w = bump(qx * qx + qy * qy);
      if (w > 0.0) {
        taps.push_back({di, dj, w});
        mass += w;
      }
    }
  }
  for (Tap& t : taps) t.w /= mass;

  const int nx = g.nx;
  const int ny = g.ny;
  const auto src = field.values();
  std::vector<double> out(field.size());
  // Every output node accumulates the taps in the same order, which keeps the
  // operation bitwise equivariant under whole-cell translations.
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    double* dst = out.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(nx);
    for (const Tap& t : taps) {
      const int sj = ((j - t.dj) % ny + ny) % ny;
      const double* srow = src.data() + static_cast<std::size_t>(sj) * static_cast<std::size_t>(nx);
      const int shift = ((t.di % nx) + nx) % nx;  // dst[i] += w * srow[i - shift]
      for (int i = 0; i < shift; ++i) dst[i] += t.w * srow[i - shift + nx];
      for (int i = shift; i < nx; ++i) dst[i] += t.w * srow[i - shift];
    }
  });
  return ScalarField2D(g, std::move(out));
}

}  // namespace lbmo
