#pragma once

#include <functional>
#include <limits>

#include "lbmo/field.hpp"

namespace lbmo {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// values[j*nx + i] = fn(node(i, j)). Throws if fn is non-finite at any node;
/// callers regularize singular points themselves.
ScalarField2D sample_analytic(const GridSpec& grid, const std::function<double(Point)>& fn);
VectorField2D sample_analytic(const GridSpec& grid, const std::function<Point(Point)>& fn);

/// Bilinear blend of the four nodes around p; p is wrapped periodically into
/// the grid box. Exact at nodes and on functions affine in each coordinate.
double interp_bilinear(const ScalarField2D& field, Point p);
Point interp_bilinear(const VectorField2D& field, Point p);

/// Quadrature Lp norm, (sum |v|^p hx hy)^(1/p); p = kInfNorm gives max |v|.
double lp_norm(const ScalarField2D& field, double p);

/// Largest n for which the mollifier support 1/n spans at least two cells.
int max_mollifier_n(const GridSpec& grid);

/// Periodic convolution with rho_n(x) = n^2 rho(n x), rho the exp(-1/(1-|x|^2))
/// bump; the discrete kernel is renormalized to unit mass on the lattice.
ScalarField2D mollify(const ScalarField2D& field, int n);

}  // namespace lbmo
