#include "lbmo/map_zoo.hpp"

#include <cmath>
#include <cstdio>

#include "lbmo/error.hpp"

namespace lbmo {

namespace {

std::string label(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

AnalyticMap identity_map() {
  AnalyticMap m;
  m.name = "identity";
  m.forward = [](Point x) { return x; };
  m.inverse = [](Point x) { return x; };
  m.star = 1.0;
  m.torus_compatible = true;
  m.family = "identity";
  return m;
}

AnalyticMap rotation_map(double angle) {
  AnalyticMap m;
  m.name = label("rotation-%.6g", angle);
  m.family = "rotation";
  m.parameter = angle;
  m.star = 1.0;
  const double quarter = std::remainder(angle, kTwoPi / 4.0);
  if (quarter == 0.0) {
    // Quarter turns permute coordinates exactly.
    const int turns = static_cast<int>(std::lround(angle / (kTwoPi / 4.0))) & 3;
    const auto turn = [](Point x, int n) {
      for (int k = 0; k < n; ++k) x = Point{-x.y, x.x};
      return x;
    };
    m.forward = [turns, turn](Point x) { return turn(x, turns); };
    m.inverse = [turns, turn](Point x) { return turn(x, (4 - turns) & 3); };
    m.torus_compatible = true;
    return m;
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  m.forward = [c, s](Point x) { return Point{c * x.x - s * x.y, s * x.x + c * x.y}; };
  m.inverse = [c, s](Point x) { return Point{c * x.x + s * x.y, -s * x.x + c * x.y}; };
  return m;
}

AnalyticMap shear_map(double k) {
  AnalyticMap m;
  m.name = label("shear-%g", k);
  m.family = "shear";
  m.parameter = k;
  m.forward = [k](Point x) { return Point{x.x + k * x.y, x.y}; };
  m.inverse = [k](Point x) { return Point{x.x - k * x.y, x.y}; };
  const double sigma = 0.5 * (std::abs(k) + std::sqrt(k * k + 4.0));
  m.star = linear_map_star(sigma);
  m.torus_compatible = std::nearbyint(k) == k;
  return m;
}

AnalyticMap twist_map(double amplitude, double radius) {
  if (!(radius > 0.0)) throw Error("twist_map: radius must be positive");
  AnalyticMap m;
  m.name = label("twist-%g", amplitude);
  m.family = "twist";
  m.parameter = amplitude;
  const auto angle = [amplitude, radius](Point x) {
    const double q = (x.x * x.x + x.y * x.y) / (radius * radius);
    if (q >= 1.0) return 0.0;
    const double w = 1.0 - q;
    return amplitude * w * w * w;
  };
  m.forward = [angle](Point x) {
    const double a = angle(x);
    if (a == 0.0) return x;
    const double c = std::cos(a);
    const double s = std::sin(a);
    return Point{c * x.x - s * x.y, s * x.x + c * x.y};
  };
  m.inverse = [angle](Point x) {
    const double a = -angle(x);  // |x| is invariant, so the angle is too
    if (a == 0.0) return x;
    const double c = std::cos(a);
    const double s = std::sin(a);
    return Point{c * x.x - s * x.y, s * x.x + c * x.y};
  };
  m.torus_compatible = radius < 0.5 * kTwoPi;
  return m;
}

double linear_map_star(double sigma_max) {
  if (!(sigma_max >= 1.0)) throw Error("linear_map_star: sigma_max must be >= 1");
  const double half_log = 0.5 * std::log(sigma_max);
  return (1.0 + half_log) * (1.0 + half_log);
}

std::vector<AnalyticMap> default_zoo() {
  std::vector<AnalyticMap> zoo;
  zoo.push_back(identity_map());
  zoo.push_back(rotation_map(kTwoPi / 4.0));
  zoo.push_back(rotation_map(0.7));
  for (double k : {1.0, 2.0, 4.0, 16.0, 64.0, 256.0}) zoo.push_back(shear_map(k));
  for (double a : {2.0, 8.0, 32.0}) zoo.push_back(twist_map(a, 2.5));
  return zoo;
}

GridSpec default_zoo_seeds() { return GridSpec::window(192, 192, {-3.0, -3.0}, 6.0, 6.0); }

SampledMap sample_map(const AnalyticMap& map, const GridSpec& seeds) {
  seeds.validate();
  SampledMap out;
  out.seeds = seeds;
  out.kind = MapKind::analytic;
  out.forward.resize(seeds.size());
  out.inverse.resize(seeds.size());
  double inv_err = 0.0;
  double jac_err = 0.0;
  for (int j = 0; j < seeds.ny; ++j) {
    for (int i = 0; i < seeds.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * seeds.nx + i;
      const Point x = seeds.node(i, j);
      out.forward[k] = map.forward(x);
      out.inverse[k] = map.inverse(x);
      inv_err = std::max(inv_err, norm(map.forward(out.inverse[k]) - x));
      const double h = 1e-5;
      const Point dx = (1.0 / (2.0 * h)) * (map.forward(x + Point{h, 0.0}) - map.forward(x - Point{h, 0.0}));
      const Point dy = (1.0 / (2.0 * h)) * (map.forward(x + Point{0.0, h}) - map.forward(x - Point{0.0, h}));
      jac_err = std::max(jac_err, std::abs(dx.x * dy.y - dx.y * dy.x - 1.0));
    }
  }
  out.inverse_error = inv_err;
  out.jacobian_error = jac_err;
  out.check_invariants();
  return out;
}

Point apply_centered(const AnalyticMap& map, Point x, Point c) { return c + map.forward(x - c); }

}  // namespace lbmo
