#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lbmo/field.hpp"
#include "lbmo/flow.hpp"

namespace lbmo {

/// Closed-form measure-preserving homeomorphism of the plane, centered at the
/// origin. `torus_compatible` maps also descend to the 2*pi torus once
/// conjugated to a lattice-node center (quarter turns, integer shears,
/// twists supported inside the fundamental cell).
struct AnalyticMap {
  std::string name;
  std::function<Point(Point)> forward;
  std::function<Point(Point)> inverse;
  std::optional<double> star;  // exact ||psi||_* when known
  bool torus_compatible = false;
  std::string family;          // "identity", "rotation", "shear", "twist"
  double parameter = 0.0;
};

AnalyticMap identity_map();
AnalyticMap rotation_map(double angle);
/// (x1 + k x2, x2).
AnalyticMap shear_map(double k);
/// Polar twist (rho, theta) -> (rho, theta + amplitude * w(rho)) with
/// w(rho) = (1 - rho^2/R^2)^3 inside rho < R and 0 outside.
AnalyticMap twist_map(double amplitude, double radius);

/// ||A||_* for a linear map of determinant 1 with largest singular value
/// sigma: (1 + ln(sigma)/2)^2.
double linear_map_star(double sigma_max);

/// Default population: identity, rotations, integer shears, twists.
std::vector<AnalyticMap> default_zoo();

/// Seed lattice used for zoo maps unless a scenario overrides it.
GridSpec default_zoo_seeds();

/// Samples both branches on the seeds and measures the invariants: the
/// inverse error exactly, the Jacobian by central differences of the
/// closed form with step 1e-5 (lattice differences would measure the
/// lattice, not the map).
SampledMap sample_map(const AnalyticMap& map, const GridSpec& seeds);

/// c + psi(x - c).
Point apply_centered(const AnalyticMap& map, Point x, Point c);

}  // namespace lbmo
