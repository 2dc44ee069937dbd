#include "lbmo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lbmo/csv.hpp"
#include "lbmo/error.hpp"
#include "lbmo/field_ops.hpp"
#include "lbmo/norms.hpp"
#include "lbmo/parallel.hpp"
#include "lbmo/rng.hpp"

namespace lbmo {

double phi(double r, double s) {
  if (!(r > 0.0) || !(s > 0.0)) throw Error("phi: arguments must be positive");
  const double a = 1.0 + std::abs(std::log(r));
  const double b = 1.0 + std::abs(std::log(s));
  if ((1.0 - s) * (1.0 - r) >= 0.0) return std::max(b / a, a / b);
  return a * b;
}

double g_of(double tau) {
  if (!(tau > 0.0)) throw Error("g_of: argument must be positive");
  if (tau >= 1.0) return std::log(1.0 + std::log(tau));
  return -std::log(1.0 - std::log(tau));
}

double g_psi(double r, double star) {
  if (!(r > 0.0)) throw Error("g_psi: radius must be positive");
  if (!(star >= 1.0)) throw Error("g_psi: modulus must be >= 1");
  if (r >= 1.0) return 4.0 * std::exp(star) * std::pow(r, star);
  return 4.0 * std::max(std::exp(1.0) * std::pow(r, 1.0 / star), std::exp(star) * r);
}

std::string to_string(MapKind k) { return k == MapKind::analytic ? "analytic" : "integrated"; }

double SampledMap::inverse_tolerance() const {
  return kind == MapKind::analytic ? kInverseTolAnalytic : kInverseTolIntegrated;
}

double SampledMap::jacobian_tolerance() const {
  return kind == MapKind::analytic ? kJacobianTolAnalytic : kJacobianTolIntegrated;
}

void SampledMap::check_invariants() const {
  if (forward.size() != seeds.size() || inverse.size() != seeds.size()) {
    throw NumericalError("sampled map: branch length does not match the seed lattice");
  }
  if (!(inverse_error <= inverse_tolerance())) {
    throw NumericalError("sampled map: forward(inverse(x)) misses x by " + csv::num(inverse_error) + " > " +
                         csv::num(inverse_tolerance()));
  }
  if (!(jacobian_error <= jacobian_tolerance())) {
    throw NumericalError("sampled map: |det J - 1| reaches " + csv::num(jacobian_error) + " > " +
                         csv::num(jacobian_tolerance()));
  }
}

Point SampledMap::seed(std::size_t k) const {
  const auto nx = static_cast<std::size_t>(seeds.nx);
  return seeds.node(static_cast<int>(k % nx), static_cast<int>(k / nx));
}

SampledMap SampledMap::inverted() const {
  SampledMap out = *this;
  std::swap(out.forward, out.inverse);
  // det D(psi^-1)(psi x) = 1 / det D psi(x), so |d - 1| <= j gives |1/d - 1| <= j / (1 - j).
  out.jacobian_error = jacobian_error < 1.0 ? jacobian_error / (1.0 - jacobian_error) : jacobian_error;
  return out;
}

double lattice_jacobian_deviation(const GridSpec& seeds, std::span<const Point> positions) {
  if (positions.size() != seeds.size()) throw Error("jacobian: position count does not match seeds");
  const int nx = seeds.nx;
  const int ny = seeds.ny;
  const double hx = seeds.hx();
  const double hy = seeds.hy();
  const auto at = [&](int i, int j) { return positions[static_cast<std::size_t>(j) * nx + i]; };
  double worst = 0.0;
  for (int j = 1; j + 1 < ny; ++j) {
    for (int i = 1; i + 1 < nx; ++i) {
      const Point dx = (1.0 / (2.0 * hx)) * (at(i + 1, j) - at(i - 1, j));
      const Point dy = (1.0 / (2.0 * hy)) * (at(i, j + 1) - at(i, j - 1));
      worst = std::max(worst, std::abs(dx.x * dy.y - dx.y * dy.x - 1.0));
    }
  }
  return worst;
}

ModulusReport modulus_over_pairs(std::span<const MappedPair> pairs) {
  ModulusReport rep;
  bool have = false;
  for (const MappedPair& p : pairs) {
    const double d = norm(p.x - p.y);
    const double e = norm(p.fx - p.fy);
    if (!(d > 0.0) || !(e > 0.0)) continue;
    const double v = phi(e, d);
    ++rep.pair_count;
    if (!have || v > rep.star) {
      rep.star = v;
      rep.argmax = p;
      have = true;
    }
  }
  return rep;
}

std::vector<MappedPair> stratified_pairs(const SampledMap& map, std::size_t pair_budget, std::uint64_t seed) {
  const GridSpec& g = map.seeds;
  if (g.size() < 2) throw Error("star_modulus: need at least two seeds");
  const double hx = g.hx();
  const double hy = g.hy();
  const double h = std::min(hx, hy);
  const double diam = std::hypot(g.lx, g.ly);
  std::vector<double> levels;
  for (double d = h; d <= diam; d *= 2.0) levels.push_back(d);
  const std::size_t per_level = std::max<std::size_t>(1, pair_budget / levels.size());
  const CounterRng rng(seed, "modulus-pairs");
  const auto nx = static_cast<long>(g.nx);
  const auto ny = static_cast<long>(g.ny);
  std::vector<MappedPair> out;
  out.reserve(per_level * levels.size());
  for (std::size_t lv = 0; lv < levels.size(); ++lv) {
    const double d = levels[lv];
    for (std::size_t m = 0; m < per_level; ++m) {
      const std::uint64_t base = (static_cast<std::uint64_t>(lv) << 40) + 3 * m;
      const auto i = std::min(nx - 1, static_cast<long>(rng.uniform(base) * nx));
      const auto j = std::min(ny - 1, static_cast<long>(rng.uniform(base + 1) * ny));
      const double theta = kTwoPi * rng.uniform(base + 2);
      auto di = std::lround(d * std::cos(theta) / hx);
      auto dj = std::lround(d * std::sin(theta) / hy);
      if (di == 0 && dj == 0) di = 1;
      long i2 = i + di;
      long j2 = j + dj;
      if (i2 < 0 || i2 >= nx || j2 < 0 || j2 >= ny) {
        i2 = i - di;
        j2 = j - dj;
      }
      if (i2 < 0 || i2 >= nx || j2 < 0 || j2 >= ny) continue;
      const auto ka = static_cast<std::size_t>(j * nx + i);
      const auto kb = static_cast<std::size_t>(j2 * nx + i2);
      out.push_back({map.seed(ka), map.seed(kb), map.forward[ka], map.forward[kb]});
    }
  }
  return out;
}

ModulusReport star_modulus(const SampledMap& map, std::size_t pair_budget, std::uint64_t seed) {
  const auto pairs = stratified_pairs(map, pair_budget, seed);
  return modulus_over_pairs(pairs);
}

double p1_violation(const MappedPair& pair, double star) {
  const double d = norm(pair.x - pair.y);
  const double e = norm(pair.fx - pair.fy);
  const double m = star;
  const double ld = std::log(d);
  double ln_lo = 0.0;
  double ln_hi = 0.0;
  if (d >= 1.0 && e >= 1.0) {
    ln_lo = -1.0 + ld / m;
    ln_hi = m + m * ld;
  } else if (d <= 1.0 && e <= 1.0) {
    ln_lo = -m + m * ld;
    ln_hi = 1.0 + ld / m;
  } else {
    ln_lo = -m + ld;
    ln_hi = m + ld;
  }
  const double le = std::log(e);
  return std::max(std::expm1(ln_lo - le), std::expm1(le - ln_hi));
}

double check_p1_bounds(const SampledMap& map, double star, std::size_t pair_budget, std::uint64_t seed) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const MappedPair& p : stratified_pairs(map, pair_budget, seed)) {
    if (norm(p.x - p.y) > 0.0 && norm(p.fx - p.fy) > 0.0) worst = std::max(worst, p1_violation(p, star));
  }
  return worst;
}

VelocitySeries::VelocitySeries(std::vector<double> times, std::vector<VectorField2D> frames)
    : times_(std::move(times)), frames_(std::move(frames)) {
  if (frames_.empty() || frames_.size() != times_.size()) throw Error("velocity series: need one time per frame");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) throw Error("velocity series: times must increase");
    if (!(frames_[k].grid() == frames_[0].grid())) throw Error("velocity series: frames on different grids");
  }
  for (const auto& f : frames_) max_speed_ = std::max(max_speed_, f.max_magnitude());
}

VelocitySeries VelocitySeries::steady(VectorField2D frame) {
  std::vector<VectorField2D> frames;
  frames.push_back(std::move(frame));
  return VelocitySeries({0.0}, std::move(frames));
}

VelocitySeries VelocitySeries::from_stream(std::vector<double> times, std::vector<VectorField2D> frames,
                                           std::vector<ScalarField2D> psi, std::vector<ScalarField2D> psi_xy) {
  VelocitySeries s(std::move(times), std::move(frames));
  if (psi.size() != s.frames_.size() || psi_xy.size() != s.frames_.size())
    throw Error("velocity series: need psi and psi_xy for every frame");
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (!(psi[k].grid() == s.grid()) || !(psi_xy[k].grid() == s.grid()))
      throw Error("velocity series: stream data on a different grid");
  }
  if (!s.grid().is_torus()) throw Error("velocity series: stream interpolation needs torus frames");
  s.psi_ = std::move(psi);
  s.psi_xy_ = std::move(psi_xy);
  return s;
}

namespace {

// Cubic Hermite basis on [0, 1] and derivatives: values at 0 (a0, b0) and 1 (a1, b1).
struct Hermite {
  double a0, a1, b0, b1;     // basis values
  double da0, da1, db0, db1;  // d/ds
};

Hermite hermite(double s) {
  const double s2 = s * s, s3 = s2 * s;
  return {2 * s3 - 3 * s2 + 1, -2 * s3 + 3 * s2, s3 - 2 * s2 + s, s3 - s2,
          6 * s2 - 6 * s,      -6 * s2 + 6 * s,  3 * s2 - 4 * s + 1, 3 * s2 - 2 * s};
}

void cell_of(double t, int n, int& i0, double& frac) {
  const double fl = std::floor(t);
  frac = t - fl;
  const long w = static_cast<long>(fl) % n;
  i0 = static_cast<int>(w < 0 ? w + n : w);
}

}  // namespace

Point VelocitySeries::frame_at(std::size_t k, Point x) const {
  if (psi_.empty()) return interp_bilinear(frames_[k], x);
  const GridSpec& g = grid();
  const double hx = g.hx(), hy = g.hy();
  int i0 = 0, j0 = 0;
  double s = 0.0, t = 0.0;
  cell_of((x.x - g.ox) / hx, g.nx, i0, s);
  cell_of((x.y - g.oy) / hy, g.ny, j0, t);
  const int i1 = (i0 + 1) % g.nx, j1 = (j0 + 1) % g.ny;
  const Hermite hs = hermite(s), ht = hermite(t);
  const auto psi = psi_[k].values();
  const auto pxy = psi_xy_[k].values();
  const auto u1 = frames_[k].u1();
  const auto u2 = frames_[k].u2();
  double ds = 0.0, dt = 0.0;  // d psi / ds, d psi / dt in cell coordinates
  const int is[2] = {i0, i1}, js[2] = {j0, j1};
  const double as[2] = {hs.a0, hs.a1}, bs[2] = {hs.b0, hs.b1}, das[2] = {hs.da0, hs.da1}, dbs[2] = {hs.db0, hs.db1};
  const double at[2] = {ht.a0, ht.a1}, bt[2] = {ht.b0, ht.b1}, dat[2] = {ht.da0, ht.da1}, dbt[2] = {ht.db0, ht.db1};
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      const std::size_t n = static_cast<std::size_t>(js[b]) * g.nx + is[a];
      const double f = psi[n], fx = hx * u2[n], fy = -hy * u1[n], fxy = hx * hy * pxy[n];
      ds += f * das[a] * at[b] + fx * dbs[a] * at[b] + fy * das[a] * bt[b] + fxy * dbs[a] * bt[b];
      dt += f * as[a] * dat[b] + fx * bs[a] * dat[b] + fy * as[a] * dbt[b] + fxy * bs[a] * dbt[b];
    }
  }
  return {-dt / hy, ds / hx};
}

Point VelocitySeries::at(double t, Point x) const {
  if (steady()) return frame_at(0, x);
  const double slack = 1e-9 * std::max(1.0, std::abs(t_end()));
  if (t < t_begin() - slack || t > t_end() + slack) {
    throw Error("velocity series: time " + csv::num(t) + " outside [" + csv::num(t_begin()) + ", " + csv::num(t_end()) +
                "]");
  }
  t = std::clamp(t, t_begin(), t_end());
  auto hi = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  hi = std::clamp<std::size_t>(hi, 1, times_.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  const Point a = frame_at(lo, x);
  if (w == 0.0) return a;
  const Point b = frame_at(hi, x);
  return (1.0 - w) * a + w * b;
}

std::vector<Point> advect(const VelocitySeries& vel, std::vector<Point> points, double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw Error("advect: dt must be positive");
  const double span = t1 - t0;
  const auto steps = static_cast<long>(std::ceil(std::abs(span) / dt - 1e-9));
  if (steps <= 0) return points;
  const double h = span / static_cast<double>(steps);
  parallel_for(points.size(), [&](std::size_t k) {
    Point x = points[k];
    for (long n = 0; n < steps; ++n) {
      const double t = t0 + static_cast<double>(n) * h;
      const Point k1 = vel.at(t, x);
      const Point k2 = vel.at(t + 0.5 * h, x + (0.5 * h) * k1);
      const Point k3 = vel.at(t + 0.5 * h, x + (0.5 * h) * k2);
      const Point k4 = vel.at(t + h, x + h * k3);
      x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    points[k] = x;
  });
  return points;
}

double max_flow_dt(const VelocitySeries& vel, const GridSpec& seeds) {
  const double speed = vel.max_speed();
  if (speed == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * std::min(seeds.hx(), seeds.hy()) / speed;
}

std::vector<SampledMap> integrate_flow_times(const VelocitySeries& vel, const GridSpec& seeds, double dt,
                                             const std::vector<double>& times) {
  seeds.validate();
  if (!(dt > 0.0)) throw Error("integrate_flow: dt must be positive");
  const double dt_max = max_flow_dt(vel, seeds);
  if (dt > dt_max * (1.0 + 1e-12)) {
    throw Error("integrate_flow: dt = " + csv::num(dt) + " violates the advective CFL bound; max admissible dt is " +
                csv::num(dt_max));
  }
  double prev = 0.0;
  for (double t : times) {
    if (!(t >= prev)) throw Error("integrate_flow: times must be nonnegative and nondecreasing");
    prev = t;
  }
  if (!times.empty() && !vel.steady() && (vel.t_begin() > 0.0 || vel.t_end() < times.back() * (1.0 - 1e-12))) {
    throw Error("integrate_flow: velocity series does not cover [0, " + csv::num(times.back()) + "]");
  }
  const std::size_t n = seeds.size();
  std::vector<Point> start(n);
  for (int j = 0; j < seeds.ny; ++j) {
    for (int i = 0; i < seeds.nx; ++i) start[static_cast<std::size_t>(j) * seeds.nx + i] = seeds.node(i, j);
  }
  // Each seed travels with four companions at +-eps along the axes; their
  // central differences give D psi without the seed spacing entering.
  const double eps = kCompanionOffset * std::min(seeds.hx(), seeds.hy());
  std::vector<Point> cloud(5 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point x = start[k];
    cloud[5 * k] = x;
    cloud[5 * k + 1] = x + Point{eps, 0.0};
    cloud[5 * k + 2] = x - Point{eps, 0.0};
    cloud[5 * k + 3] = x + Point{0.0, eps};
    cloud[5 * k + 4] = x - Point{0.0, eps};
  }

  std::vector<SampledMap> out;
  double t_now = 0.0;
  for (double t : times) {
    cloud = advect(vel, std::move(cloud), t_now, t, dt);
    t_now = t;
    const auto inv = advect(vel, start, t, 0.0, dt);
    const auto back = advect(vel, inv, 0.0, t, dt);
    SampledMap map;
    map.seeds = seeds;
    map.kind = MapKind::integrated;
    map.forward.resize(n);
    double jac = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      map.forward[k] = cloud[5 * k];
      map.inverse_error = std::max(map.inverse_error, norm(back[k] - start[k]));
      const Point dx = (0.5 / eps) * (cloud[5 * k + 1] - cloud[5 * k + 2]);
      const Point dy = (0.5 / eps) * (cloud[5 * k + 3] - cloud[5 * k + 4]);
      jac = std::max(jac, std::abs(dx.x * dy.y - dx.y * dy.x - 1.0));
    }
    map.jacobian_error = jac;
    map.inverse = inv;
    map.check_invariants();
    out.push_back(std::move(map));
  }
  return out;
}

SampledMap integrate_flow(const VelocitySeries& vel, const GridSpec& seeds, double dt, double t, Direction direction) {
  if (!(t >= 0.0)) throw Error("integrate_flow: t must be >= 0");
  SampledMap map = std::move(integrate_flow_times(vel, seeds, dt, {t}).front());
  return direction == Direction::backward ? map.inverted() : map;
}

std::vector<FlowModulusRow> check_flow_modulus(const VelocitySeries& vel, const GridSpec& seeds, double dt,
                                               const std::vector<double>& times, const FlowModulusOptions& opt) {
  std::vector<double> ll(vel.frames().size());
  for (std::size_t k = 0; k < ll.size(); ++k) ll[k] = ll_norm_estimate(vel.frames()[k], opt.ll_pair_budget, opt.seed);

  const auto ll_integral = [&](double t) {
    if (vel.steady()) return ll.front() * t;
    const auto& ts = vel.times();
    double acc = 0.0;
    for (std::size_t k = 1; k < ts.size() && ts[k - 1] < t; ++k) {
      const double b = std::min(ts[k], t);
      const double w = (b - ts[k - 1]) / (ts[k] - ts[k - 1]);
      const double ll_b = (1.0 - w) * ll[k - 1] + w * ll[k];
      acc += 0.5 * (ll[k - 1] + ll_b) * (b - ts[k - 1]);
    }
    return acc;
  };

  std::vector<FlowModulusRow> rows;
  const auto maps = integrate_flow_times(vel, seeds, dt, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const SampledMap& map = maps[k];
    FlowModulusRow row;
    row.t = t;
    row.star = star_modulus(map, opt.star_pair_budget, opt.seed).star;
    row.bound = std::exp(ll_integral(t));
    row.ratio = row.star / row.bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lbmo
