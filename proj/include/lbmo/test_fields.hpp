#pragma once

#include <cstdint>
#include <optional>

#include "lbmo/field.hpp"

namespace lbmo {

/// ln(1 - ln|x|) for |x| < 1 and 0 beyond, with |x| clamped below at `clamp`.
double lbmo_example_value(Point x, double clamp);

/// The example centered on the window's origin point (0, 0), clamped at h/2.
ScalarField2D lbmo_example(const GridSpec& window);

/// The example centered at the torus midpoint, measured with periodic
/// distance (its support stays inside the fundamental cell when the sides
/// exceed 2); optionally mollified with rho_n.
ScalarField2D periodized_example(const GridSpec& torus, std::optional<int> mollify_n = std::nullopt);

/// sign(x1 - offset); 0 on the line itself.
ScalarField2D sign_field(const GridSpec& grid, double offset);

/// Zero-mean trigonometric polynomial with modes |m|_inf <= max_mode and
/// amplitudes ~ 1/|m|^2 drawn from the seed; periodic on the grid box.
ScalarField2D random_smooth(const GridSpec& grid, std::uint64_t seed, int max_mode = 4);

/// -2 amp sin(k x1) sin(k x2), k = 2 pi / l: stationary for the Euler flow.
ScalarField2D taylor_green(const GridSpec& grid, double amp = 1.0);
/// Velocity of taylor_green: amp (-sin x1 cos x2, cos x1 sin x2) on the 2 pi torus.
VectorField2D taylor_green_velocity(const GridSpec& grid, double amp = 1.0);

/// Two Taylor-Green cells of different wavenumber: smooth and not stationary.
ScalarField2D two_mode_field(const GridSpec& grid);

/// Smooth radial bump (1 - |x - c|^2 / R^2)^4 on |x - c| < R, Euclidean.
ScalarField2D radial_bump(const GridSpec& grid, Point c, double radius);
/// Its total mass integral over the plane: pi R^2 / 5.
double radial_bump_mass(double radius);

}  // namespace lbmo
