#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "lbmo/error.hpp"
#include "lbmo/field_ops.hpp"
#include "lbmo/norms.hpp"
#include "lbmo/test_fields.hpp"

using namespace lbmo;

namespace {

double periodic_gap(double d, double l) { return d - l * std::round(d / l); }

// Independent node count: loops over every node of the grid.
std::size_t brute_nodes(const GridSpec& g, const Ball& b) {
  std::size_t count = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      Point d = g.node(i, j) - b.center;
      if (g.is_torus()) d = {periodic_gap(d.x, g.lx), periodic_gap(d.y, g.ly)};
      count += norm(d) < b.radius;
    }
  return count;
}

double center_gap(const GridSpec& g, Point a, Point b) {
  Point d = a - b;
  if (g.is_torus()) d = {periodic_gap(d.x, g.lx), periodic_gap(d.y, g.ly)};
  return norm(d);
}

BallFamily translated(BallFamily fam, int di, int dj) {
  for (Ball& b : fam.balls) b.center = b.center + Point{di * fam.grid.hx(), dj * fam.grid.hy()};
  return fam;
}

}  // namespace

TEST_CASE("ball family construction") {
  const GridSpec g = GridSpec::torus(256, 256);
  SUBCASE("single scale has no pairs") {
    const BallFamily f = make_ball_family(g, 0, 8, 1);
    CHECK(f.pairs.empty());
    for (const Ball& b : f.balls) CHECK(b.radius == 1.0);
  }
  SUBCASE("every pair is admissible") {
    const BallFamily f = make_ball_family(g, 3, 64, 1);
    REQUIRE(!f.pairs.empty());
    for (auto [o, i] : f.pairs) {
      const Ball& bo = f.balls[o];
      const Ball& bi = f.balls[i];
      CHECK(bo.radius <= 1.0);
      CHECK(center_gap(g, bo.center, bi.center) + 2.0 * bi.radius <= bo.radius * (1 + 1e-12));
      CHECK(lbmo_denominator(bo.radius, bi.radius) >= 1.0);
    }
  }
  SUBCASE("deterministic in the seed") {
    const BallFamily a = make_ball_family(g, 3, 16, 7), b = make_ball_family(g, 3, 16, 7);
    REQUIRE(a.balls.size() == b.balls.size());
    for (std::size_t k = 0; k < a.balls.size(); ++k) CHECK(a.balls[k].center == b.balls[k].center);
    CHECK(a.pairs == b.pairs);
  }
  SUBCASE("node-count rule") {
    const GridSpec g512 = GridSpec::torus(512, 512);
    const int jmax = max_admissible_j_max(g512, 16, 0);
    CHECK(jmax == 4);
    const BallFamily f = make_ball_family(g512, jmax, 16, 0);
    for (const Ball& b : f.balls) {
      const std::size_t n = brute_nodes(g512, b);
      CHECK(n == nodes_in_ball(g512, b));
      CHECK(n >= kMinBallNodes);
    }
    try {
      make_ball_family(g512, 5, 16, 0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("4") != std::string::npos);
    }
  }
}

TEST_CASE("ball averages") {
  SUBCASE("constant") {
    const auto f = ScalarField2D::constant(GridSpec::torus(128, 128), 2.25);
    CHECK(ball_average(f, {{1.0, 5.0}, 0.5}) == doctest::Approx(2.25).epsilon(1e-14));
  }
  SUBCASE("odd symmetry") {
    const GridSpec w = GridSpec::window(256, 256, {-2, -2}, 4, 4);
    const double a = 0.3, b = -0.2;
    const auto f = sample_analytic(w, [&](Point x) { return x.x - a; });
    CHECK(std::abs(ball_average(f, {{a, b}, 0.5})) <= 2.0 * w.hx());
  }
  SUBCASE("second moment") {
    const GridSpec w = GridSpec::window(1024, 1024, {-1, -1}, 2, 2);
    const auto f = sample_analytic(w, [](Point x) { return x.x * x.x + x.y * x.y; });
    CHECK(std::abs(ball_average(f, {{0, 0}, 0.5}) - 0.125) <= 1e-3);
  }
  SUBCASE("too few nodes") {
    const auto f = ScalarField2D::zeros(GridSpec::torus(64, 64));
    CHECK_THROWS_AS(ball_average(f, {{1, 1}, 0.1}), Error);
  }
}

TEST_CASE("bmo estimate") {
  const GridSpec g = GridSpec::torus(512, 512);
  SUBCASE("constant") {
    const BallFamily fam = make_ball_family(g, 3, 16, 0);
    CHECK(std::abs(bmo_estimate(ScalarField2D::constant(g, -7.0), fam)) <= 1e-12);
  }
  SUBCASE("jump through a ball center") {
    // The center set starts at the grid midpoint, so a jump placed there is
    // split evenly by the first ball of every scale.
    const BallFamily fam = make_ball_family(g, 4, 16, 0);
    const auto f = sign_field(g, g.center().x);
    const double est = bmo_estimate(f, fam);
    CHECK(est <= 1.0);
    CHECK(est >= 0.97);
  }
  SUBCASE("monotone under enrichment") {
    const auto f = random_smooth(g, 3, 6);
    double prev = 0.0;
    for (int centers : {4, 8, 16, 32}) {
      const double e = bmo_estimate(f, make_ball_family(g, 3, centers, 5));
      CHECK(e >= prev);
      prev = e;
    }
  }
}

TEST_CASE("lbmo second term and full estimate") {
  const GridSpec g = GridSpec::torus(256, 256);
  const BallFamily fam = make_ball_family(g, 3, 16, 0);
  SUBCASE("constant") {
    const auto rep = lbmo_estimate(ScalarField2D::constant(g, 3.0), fam);
    CHECK(std::abs(rep.lbmo) <= 1e-13);
  }
  SUBCASE("bounded by the range for a sign field") {
    const double t = lbmo_second_term(sign_field(g, 1.3), fam);
    CHECK(t <= 2.0);
    CHECK(t > 0.0);
  }
  SUBCASE("no pairs") {
    const BallFamily one = make_ball_family(g, 0, 4, 0);
    try {
      lbmo_second_term(random_smooth(g, 1), one);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "family has no admissible pairs");
    }
  }
  SUBCASE("homogeneity and composition") {
    const auto f = random_smooth(g, 8, 6).plus(sign_field(g, 2.0));
    const auto a = lbmo_estimate(f, fam, {1.5, kInfNorm});
    const auto b = lbmo_estimate(f.scaled(2.5), fam, {1.5, kInfNorm});
    CHECK(b.lbmo == doctest::Approx(2.5 * a.lbmo).epsilon(1e-12));
    CHECK(b.lp.at(1.5) == doctest::Approx(2.5 * a.lp.at(1.5)).epsilon(1e-12));
    CHECK(a.lbmo == a.bmo + a.lbmo_second_term);
    CHECK(a.ball_count == fam.balls.size());
    CHECK(a.pair_count == fam.pairs.size());
  }
  SUBCASE("dominated by the sup norm") {
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto f = random_smooth(g, s, 8);
      CHECK(lbmo_estimate(f, fam).lbmo <= 4.0 * f.max_abs());
    }
  }
  SUBCASE("translation covariance") {
    const auto f = random_smooth(g, 2, 10).plus(sign_field(g, 1.0));
    const auto a = lbmo_estimate(f, fam);
    const auto b = lbmo_estimate(f.shifted(11, -5), translated(fam, 11, -5));
    CHECK(a.bmo == doctest::Approx(b.bmo).epsilon(1e-13));
    CHECK(a.lbmo == doctest::Approx(b.lbmo).epsilon(1e-13));
  }
}

TEST_CASE("mollified example does not gain lbmo") {
  const GridSpec w = GridSpec::window(512, 512, {-1, -1}, 2, 2);
  const auto f = lbmo_example(w);
  const BallFamily fam = make_ball_family(w, 4, 16, 0);
  const double base = lbmo_estimate(f, fam).lbmo;
  for (int n : {8, 16}) CHECK(lbmo_estimate(mollify(f, n), fam).lbmo <= 1.05 * base);
}

TEST_CASE("log-Lipschitz estimate") {
  SUBCASE("zero field") {
    CHECK(ll_norm_estimate(VectorField2D::zeros(GridSpec::torus(64, 64)), 2000, 0) == 0.0);
  }
  SUBCASE("linear shear peaks at unit separation") {
    const GridSpec w = GridSpec::window(256, 256, {0, 0}, kTwoPi, kTwoPi);
    const auto u = sample_analytic(w, [](Point x) { return Point{x.y, 0.0}; });
    const double est = ll_norm_estimate(u, 20000, 1);
    CHECK(est <= 1.0 + 1e-12);
    CHECK(est >= 0.95);
  }
  SUBCASE("monotone in the budget") {
    const GridSpec g = GridSpec::torus(128, 128);
    const auto u = taylor_green_velocity(g);
    double prev = 0.0;
    for (std::size_t b : {1000u, 4000u, 16000u}) {
      const double e = ll_norm_estimate(u, b, 3);
      CHECK(e >= prev);
      prev = e;
    }
  }
  CHECK_THROWS_AS(ll_norm_estimate(VectorField2D::zeros(GridSpec::torus(64, 64)), 10, 0), Error);
}

TEST_CASE("two-ball bound ratio") {
  SUBCASE("sign field is refinement stable") {
    const GridSpec a = GridSpec::torus(256, 256), b = GridSpec::torus(512, 512);
    const double ra = check_two_ball_bound(sign_field(a, 2.0), make_ball_family(a, 3, 16, 0));
    const double rb = check_two_ball_bound(sign_field(b, 2.0), make_ball_family(b, 4, 32, 0));
    CHECK(std::isfinite(ra));
    CHECK(std::abs(rb - ra) <= 0.2 * ra);
  }
  SUBCASE("single mode") {
    const GridSpec g = GridSpec::torus(256, 256);
    const BallFamily fam = make_ball_family(g, 3, 16, 0);
    const auto f = sample_analytic(g, [](Point x) { return std::sin(x.x); });
    const double r = check_two_ball_bound(f, fam);
    CHECK(r <= 10.0);
    CHECK(check_two_ball_bound(f.scaled(5.0), fam) == doctest::Approx(r).epsilon(1e-12));
    CHECK_THROWS_AS(check_two_ball_bound(ScalarField2D::constant(g, 1.0), fam), Error);
  }
}
