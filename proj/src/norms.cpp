#include "lbmo/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "lbmo/csv.hpp"
#include "lbmo/error.hpp"
#include "lbmo/field_ops.hpp"
#include "lbmo/parallel.hpp"
#include "lbmo/rng.hpp"

namespace lbmo {

namespace {

// Calls emit(offset, len) for every contiguous run of storage indices whose
// nodes lie strictly inside the ball. Offsets inside a row are relative to
// the (unwrapped) center in lattice units, so shifting field and center by
// whole cells visits the same values in the same order.
template <class Emit>
void for_each_segment(const GridSpec& g, const Ball& b, Emit&& emit) {
  const double hx = g.hx();
  const double hy = g.hy();
  const double ci = (b.center.x - g.ox) / hx;
  const double cj = (b.center.y - g.oy) / hy;
  const double r2 = b.radius * b.radius;
  const bool torus = g.is_torus();
  if (torus && (2.0 * b.radius >= g.lx || 2.0 * b.radius >= g.ly)) {
    throw Error("ball: radius must be below half the torus side");
  }
  const auto j_lo = static_cast<long>(std::floor(cj - b.radius / hy));
  const auto j_hi = static_cast<long>(std::ceil(cj + b.radius / hy));
  const auto nx = static_cast<long>(g.nx);
  const auto ny = static_cast<long>(g.ny);
  for (long j = j_lo; j <= j_hi; ++j) {
    const double dy = (static_cast<double>(j) - cj) * hy;
    const double rem = r2 - dy * dy;
    if (!(rem > 0.0)) continue;
    const auto inside = [&](long i) {
      const double dx = (static_cast<double>(i) - ci) * hx;
      return dx * dx + dy * dy < r2;
    };
    const double half = std::sqrt(rem) / hx;
    auto i_lo = static_cast<long>(std::ceil(ci - half));
    auto i_hi = static_cast<long>(std::floor(ci + half));
    while (inside(i_lo - 1)) --i_lo;
    while (i_lo <= i_hi && !inside(i_lo)) ++i_lo;
    while (inside(i_hi + 1)) ++i_hi;
    while (i_hi >= i_lo && !inside(i_hi)) --i_hi;
    if (i_lo > i_hi) continue;
    if (!torus) {
      if (j < 0 || j >= ny) continue;
      i_lo = std::max(i_lo, 0L);
      i_hi = std::min(i_hi, nx - 1);
      if (i_lo > i_hi) continue;
      emit(static_cast<std::size_t>(j * nx + i_lo), static_cast<std::size_t>(i_hi - i_lo + 1));
      continue;
    }
    const long jw = ((j % ny) + ny) % ny;
    const long iw = ((i_lo % nx) + nx) % nx;
    const long len = i_hi - i_lo + 1;
    if (iw + len <= nx) {
      emit(static_cast<std::size_t>(jw * nx + iw), static_cast<std::size_t>(len));
    } else {
      emit(static_cast<std::size_t>(jw * nx + iw), static_cast<std::size_t>(nx - iw));
      emit(static_cast<std::size_t>(jw * nx), static_cast<std::size_t>(len - (nx - iw)));
    }
  }
}

struct BallStats {
  double average;
  std::size_t count;
};

// Sums deviations from the first visited value, so a constant field yields
// its constant exactly.
BallStats ball_stats(const ScalarField2D& field, const Ball& ball) {
  const auto v = field.values();
  double ref = 0.0;
  bool have_ref = false;
  double sum = 0.0;
  std::size_t count = 0;
  for_each_segment(field.grid(), ball, [&](std::size_t off, std::size_t len) {
    if (!have_ref) {
      ref = v[off];
      have_ref = true;
    }
    for (std::size_t k = off; k < off + len; ++k) sum += v[k] - ref;
    count += len;
  });
  if (count < kMinBallNodes) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "ball_average: ball (%.6g, %.6g; r=%.6g) covers %zu nodes, need at least %zu",
                  ball.center.x, ball.center.y, ball.radius, count, kMinBallNodes);
    throw Error(buf);
  }
  return {ref + sum / static_cast<double>(count), count};
}

double mean_abs_deviation(const ScalarField2D& field, const Ball& ball, double average) {
  const auto v = field.values();
  double sum = 0.0;
  std::size_t count = 0;
  for_each_segment(field.grid(), ball, [&](std::size_t off, std::size_t len) {
    for (std::size_t k = off; k < off + len; ++k) sum += std::abs(v[k] - average);
    count += len;
  });
  return sum / static_cast<double>(count);
}

double center_distance(const GridSpec& g, Point a, Point b) {
  double dx = std::abs(a.x - b.x);
  double dy = std::abs(a.y - b.y);
  if (g.is_torus()) {
    dx = std::fmod(dx, g.lx);
    dy = std::fmod(dy, g.ly);
    dx = std::min(dx, g.lx - dx);
    dy = std::min(dy, g.ly - dy);
  }
  return std::hypot(dx, dy);
}

void check_family_grid(const ScalarField2D& field, const BallFamily& fam) {
  if (!(field.grid() == fam.grid)) throw Error("ball family was built for a different grid (" + fam.grid.id() + ")");
}

// Plastic-number (R2) sequence; the anchor (box center) is always first.
std::vector<Point> unit_centers(int count, std::uint64_t seed) {
  constexpr double plastic = 1.32471795724474602596;
  const double a1 = 1.0 / plastic;
  const double a2 = 1.0 / (plastic * plastic);
  const CounterRng rng(seed, "ball-centers");
  const double s1 = rng.uniform(0);
  const double s2 = rng.uniform(1);
  std::vector<Point> out;
  out.push_back({0.5, 0.5});
  for (int k = 1; k < count; ++k) {
    const double u = s1 + k * a1;
    const double w = s2 + k * a2;
    out.push_back({u - std::floor(u), w - std::floor(w)});
  }
  return out;
}

std::vector<Ball> scale_balls(const GridSpec& g, int j, const std::vector<Point>& unit) {
  const double r = std::ldexp(1.0, -j);
  std::vector<Ball> out;
  if (g.is_torus()) {
    if (2.0 * r >= std::min(g.lx, g.ly)) throw Error("ball family: radius " + csv::num(r) + " wraps the torus");
    for (std::size_t k = 0; k < unit.size(); ++k) {
      const Point c = k == 0 ? g.center() : Point{g.ox + unit[k].x * g.lx, g.oy + unit[k].y * g.ly};
      out.push_back({c, r});
    }
    return out;
  }
  // Window balls stay inside the closed box.
  const double wx = g.lx - 2.0 * r;
  const double wy = g.ly - 2.0 * r;
  if (wx < 0.0 || wy < 0.0) throw Error("ball family: window too small for radius " + csv::num(r));
  for (std::size_t k = 0; k < unit.size(); ++k) {
    const Point c = k == 0 ? g.center() : Point{g.ox + r + unit[k].x * wx, g.oy + r + unit[k].y * wy};
    bool duplicate = false;
    for (const Ball& b : out) duplicate = duplicate || b.center == c;
    if (!duplicate) out.push_back({c, r});
  }
  return out;
}

std::size_t min_nodes(const GridSpec& g, const std::vector<Ball>& balls) {
  std::size_t m = static_cast<std::size_t>(-1);
  for (const Ball& b : balls) m = std::min(m, nodes_in_ball(g, b));
  return m;
}

}  // namespace

std::size_t nodes_in_ball(const GridSpec& grid, const Ball& ball) {
  std::size_t count = 0;
  for_each_segment(grid, ball, [&](std::size_t, std::size_t len) { count += len; });
  return count;
}

int max_admissible_j_max(const GridSpec& grid, int centers_per_scale, std::uint64_t seed) {
  const auto unit = unit_centers(std::max(centers_per_scale, 1), seed);
  int best = -1;
  for (int j = 0; j < 60; ++j) {
    if (std::ldexp(1.0, -j) < 0.5 * grid.h_max()) break;
    if (min_nodes(grid, scale_balls(grid, j, unit)) < kMinBallNodes) break;
    best = j;
  }
  return best;
}

BallFamily make_ball_family(const GridSpec& grid, int j_max, int centers_per_scale, std::uint64_t seed) {
  grid.validate();
  if (j_max < 0) throw Error("ball family: j_max must be >= 0");
  if (centers_per_scale < 1) throw Error("ball family: centers_per_scale must be positive");
  const auto unit = unit_centers(centers_per_scale, seed);

  BallFamily fam;
  fam.grid = grid;
  fam.j_max = j_max;
  fam.centers_per_scale = centers_per_scale;
  fam.seed = seed;
  fam.r_max = 1.0;
  fam.r_min = std::ldexp(1.0, -j_max);
  std::vector<std::size_t> first_of_scale;
  for (int j = 0; j <= j_max; ++j) {
    auto balls = scale_balls(grid, j, unit);
    if (min_nodes(grid, balls) < kMinBallNodes) {
      throw Error("ball family: j_max = " + std::to_string(j_max) + " is too deep for grid " + grid.id() +
                  " (balls of radius 2^-" + std::to_string(j) + " cover fewer than " + std::to_string(kMinBallNodes) +
                  " nodes); max admissible j_max is " + std::to_string(max_admissible_j_max(grid, centers_per_scale, seed)));
    }
    first_of_scale.push_back(fam.balls.size());
    for (const Ball& b : balls) {
      fam.balls.push_back(b);
      fam.scale.push_back(j);
    }
  }
  first_of_scale.push_back(fam.balls.size());

  for (int j1 = 0; j1 <= j_max; ++j1) {
    for (int j2 = j1 + 1; j2 <= j_max; ++j2) {
      for (std::size_t a = first_of_scale[j1]; a < first_of_scale[j1 + 1]; ++a) {
        for (std::size_t b = first_of_scale[j2]; b < first_of_scale[j2 + 1]; ++b) {
          const Ball& outer = fam.balls[a];
          const Ball& inner = fam.balls[b];
          if (center_distance(grid, outer.center, inner.center) + 2.0 * inner.radius <= outer.radius) {
            if (!(lbmo_denominator(outer.radius, inner.radius) >= 1.0)) {
              throw Error("ball family: denominator below 1 for an admissible pair");
            }
            fam.pairs.emplace_back(a, b);
          }
        }
      }
    }
  }
  return fam;
}

double ball_average(const ScalarField2D& field, const Ball& ball) { return ball_stats(field, ball).average; }

std::vector<double> ball_averages(const ScalarField2D& field, const BallFamily& fam) {
  check_family_grid(field, fam);
  std::vector<double> out(fam.balls.size());
  parallel_for(out.size(), [&](std::size_t k) { out[k] = ball_average(field, fam.balls[k]); });
  return out;
}

double lbmo_denominator(double r_outer, double r_inner) {
  return 1.0 + std::log((1.0 - std::log(r_inner)) / (1.0 - std::log(r_outer)));
}

namespace {

double bmo_from_averages(const ScalarField2D& field, const BallFamily& fam, const std::vector<double>& avg) {
  std::vector<double> mad(fam.balls.size());
  parallel_for(mad.size(), [&](std::size_t k) { mad[k] = mean_abs_deviation(field, fam.balls[k], avg[k]); });
  double best = 0.0;
  for (double m : mad) best = std::max(best, m);
  return best;
}

double second_term_from_averages(const BallFamily& fam, const std::vector<double>& avg) {
  if (fam.pairs.empty()) throw Error("family has no admissible pairs");
  double best = 0.0;
  for (const auto& [outer, inner] : fam.pairs) {
    const double num = std::abs(avg[inner] - avg[outer]);
    best = std::max(best, num / lbmo_denominator(fam.balls[outer].radius, fam.balls[inner].radius));
  }
  return best;
}

}  // namespace

double bmo_estimate(const ScalarField2D& field, const BallFamily& fam) {
  return bmo_from_averages(field, fam, ball_averages(field, fam));
}

double lbmo_second_term(const ScalarField2D& field, const BallFamily& fam) {
  if (fam.pairs.empty()) throw Error("family has no admissible pairs");
  return second_term_from_averages(fam, ball_averages(field, fam));
}

NormReport lbmo_estimate(const ScalarField2D& field, const BallFamily& fam, const std::vector<double>& ps) {
  NormReport rep;
  for (double p : ps) rep.lp[p] = lp_norm(field, p);
  const auto avg = ball_averages(field, fam);
  rep.bmo = bmo_from_averages(field, fam, avg);
  rep.lbmo_second_term = second_term_from_averages(fam, avg);
  rep.lbmo = rep.bmo + rep.lbmo_second_term;
  rep.ball_count = fam.balls.size();
  rep.pair_count = fam.pairs.size();
  rep.grid_id = field.grid().id();
  return rep;
}

double check_two_ball_bound(const ScalarField2D& field, const BallFamily& fam) {
  if (fam.pairs.empty()) throw Error("family has no admissible pairs");
  const auto avg = ball_averages(field, fam);
  const double bmo = bmo_from_averages(field, fam, avg);
  if (!(bmo > 1e-13 * std::max(field.max_abs(), 1e-300))) throw Error("field is constant at this resolution");
  double best = 0.0;
  for (const auto& [outer, inner] : fam.pairs) {
    const double r1 = fam.balls[outer].radius;
    const double r2 = fam.balls[inner].radius;
    best = std::max(best, std::abs(avg[inner] - avg[outer]) / (std::log(1.0 + r1 / r2) * bmo));
  }
  return best;
}

double ll_norm_estimate(const VectorField2D& vel, std::size_t pair_budget, std::uint64_t seed) {
  if (pair_budget < 1000) throw Error("ll_norm_estimate: pair_budget must be >= 1000");
  const GridSpec& g = vel.grid();
  const bool torus = g.is_torus();
  const auto u1 = vel.u1();
  const auto u2 = vel.u2();
  const auto quotient = [](Point du, double d) { return norm(du) / (d * (1.0 + std::abs(std::log(d)))); };

  // (a) adjacent-node pairs on a sublattice whose power-of-two stride keeps
  // this part within half the budget.
  int stride = 1;
  while (2.0 * std::ceil(double(g.nx) / stride) * std::ceil(double(g.ny) / stride) > double(pair_budget) / 2.0) {
    stride *= 2;
  }
  double best = 0.0;
  const double hx = g.hx();
  const double hy = g.hy();
  for (int j = 0; j < g.ny; j += stride) {
    for (int i = 0; i < g.nx; i += stride) {
      const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
      if (torus || i + 1 < g.nx) {
        const std::size_t kr = static_cast<std::size_t>(j) * g.nx + (i + 1) % g.nx;
        best = std::max(best, quotient({u1[kr] - u1[k], u2[kr] - u2[k]}, hx));
      }
      if (torus || j + 1 < g.ny) {
        const std::size_t ku = static_cast<std::size_t>((j + 1) % g.ny) * g.nx + i;
        best = std::max(best, quotient({u1[ku] - u1[k], u2[ku] - u2[k]}, hy));
      }
    }
  }

  // (b) random pairs at separations 2^k between the cell size and half the
  // shorter side (periodic distance equals the separation there).
  std::vector<double> seps;
  const double d_max = 0.5 * std::min(g.lx, g.ly);
  for (int k = -60; k < 60; ++k) {
    const double d = std::ldexp(1.0, k);
    if (d >= g.h_max() && d <= d_max) seps.push_back(d);
  }
  if (seps.empty()) return best;
  const std::size_t per_scale = (pair_budget / 2) / seps.size();
  const CounterRng rng(seed, "ll-pairs");
  // Window fields interpolate without wrapping inside [o, o + (n-1) h].
  const double x_hi = torus ? g.lx : (g.nx - 1) * hx;
  const double y_hi = torus ? g.ly : (g.ny - 1) * hy;
  const auto in_window = [&](Point p) {
    return torus || (p.x >= g.ox && p.x <= g.ox + x_hi && p.y >= g.oy && p.y <= g.oy + y_hi);
  };
  std::vector<double> scale_best(seps.size(), 0.0);
  parallel_for(seps.size(), [&](std::size_t s) {
    const double d = seps[s];
    double local = 0.0;
    for (std::size_t m = 0; m < per_scale; ++m) {
      const std::uint64_t base = (static_cast<std::uint64_t>(s) << 40) + 3 * m;
      const Point x{g.ox + rng.uniform(base) * x_hi, g.oy + rng.uniform(base + 1) * y_hi};
      const double theta = kTwoPi * rng.uniform(base + 2);
      const Point step{d * std::cos(theta), d * std::sin(theta)};
      Point y = x + step;
      if (!in_window(y)) y = x - step;
      if (!in_window(y)) continue;
      local = std::max(local, quotient(interp_bilinear(vel, y) - interp_bilinear(vel, x), d));
    }
    scale_best[s] = local;
  });
  for (double v : scale_best) best = std::max(best, v);
  return best;
}

std::string NormReport::csv_header() { return "t,lp2,bmo,lbmo2,lbmo,ll"; }

std::string NormReport::csv_row(double t) const {
  const auto it = lp.find(2.0);
  return csv::num(t) + "," + (it == lp.end() ? std::string() : csv::num(it->second)) + "," + csv::num(bmo) + "," +
         csv::num(lbmo_second_term) + "," + csv::num(lbmo) + "," + (ll ? csv::num(*ll) : std::string());
}

std::string NormReport::to_json() const {
  nlohmann::ordered_json j;
  for (const auto& [p, v] : lp) {
    std::string key = "lp";
    if (std::isinf(p)) {
      key += "inf";
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", p);
      key += buf;
    }
    j[key] = v;
  }
  j["bmo"] = bmo;
  j["lbmo_second_term"] = lbmo_second_term;
  j["lbmo"] = lbmo;
  if (ll) {
    j["ll"] = *ll;
  } else {
    j["ll"] = nullptr;
  }
  j["balls"] = ball_count;
  j["pairs"] = pair_count;
  j["grid"] = grid_id;
  return j.dump();
}

}  // namespace lbmo
