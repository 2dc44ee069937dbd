#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "lbmo/biot_savart.hpp"
#include "lbmo/error.hpp"
#include "lbmo/field_ops.hpp"
#include "lbmo/test_fields.hpp"

using namespace lbmo;

namespace {

double max_diff(const VectorField2D& u, const VectorField2D& v) {
  double d = 0.0;
  for (std::size_t k = 0; k < u.grid().size(); ++k)
    d = std::max({d, std::abs(u.u1()[k] - v.u1()[k]), std::abs(u.u2()[k] - v.u2()[k])});
  return d;
}

}  // namespace

TEST_CASE("spectral workspace") {
  CHECK_THROWS_AS(SpectralWorkspace(GridSpec::torus(48, 64)), Error);
  CHECK_THROWS_AS(SpectralWorkspace(GridSpec::window(64, 64, {-1, -1}, 2, 2)), Error);
  const GridSpec g = GridSpec::torus(32, 16);
  SpectralWorkspace ws(g);
  CHECK(ws.spectrum_size() == 16u * 17u);
  CHECK(ws.mode_y(15) == -1);
  CHECK(ws.dealias_keep(10, 0));
  CHECK_FALSE(ws.dealias_keep(11, 0));
  const auto f = random_smooth(g, 6, 5);
  std::vector<std::complex<double>> hat;
  std::vector<double> back;
  ws.forward(f.values(), hat);
  ws.inverse(hat, back);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(back[k] == doctest::Approx(f.values()[k]).epsilon(1e-13).scale(1.0));
}

TEST_CASE("torus inversion on closed forms") {
  const GridSpec g = GridSpec::torus(128, 128);
  SpectralWorkspace ws(g);
  SUBCASE("zero") {
    const auto u = velocity_from_vorticity_torus(ScalarField2D::zeros(g), ws);
    CHECK(u.max_magnitude() == 0.0);
  }
  SUBCASE("single mode") {
    const auto w = sample_analytic(g, [](Point x) { return std::cos(x.x); });
    const auto exact = sample_analytic(g, [](Point x) { return Point{0.0, std::sin(x.x)}; });
    CHECK(max_diff(velocity_from_vorticity_torus(w, ws), exact) <= 1e-10);
  }
  SUBCASE("Taylor-Green") {
    const auto w = taylor_green(g);
    const auto exact = sample_analytic(g, [](Point x) {
      return Point{-std::sin(x.x) * std::cos(x.y), std::cos(x.x) * std::sin(x.y)};
    });
    CHECK(max_diff(velocity_from_vorticity_torus(w, ws), exact) <= 1e-10);
    CHECK(max_diff(taylor_green_velocity(g), exact) <= 1e-15);
  }
  SUBCASE("oblique mode on a stretched box") {
    // omega = cos(a x + b y) with a = 2 pi / lx, b = 3 * 2 pi / ly:
    // u = (-b, a) sin(a x + b y) / (a^2 + b^2).
    const GridSpec r = GridSpec::torus(64, 32, 3.0, 1.5);
    SpectralWorkspace wr(r);
    const double a = kTwoPi / 3.0, b = 3.0 * kTwoPi / 1.5, k2 = a * a + b * b;
    const auto w = sample_analytic(r, [&](Point x) { return std::cos(a * x.x + b * x.y); });
    const auto exact = sample_analytic(r, [&](Point x) {
      const double s = std::sin(a * x.x + b * x.y) / k2;
      return Point{-b * s, a * s};
    });
    CHECK(max_diff(velocity_from_vorticity_torus(w, wr), exact) <= 1e-12);
  }
  SUBCASE("nonzero mean is rejected") {
    CHECK_THROWS_AS(velocity_from_vorticity_torus(ScalarField2D::constant(g, 1.0), ws), Error);
  }
}

TEST_CASE("inversion invariants") {
  const GridSpec g = GridSpec::torus(128, 128);
  SpectralWorkspace ws(g);
  const auto w1 = random_smooth(g, 1, 12);
  const auto w2 = random_smooth(g, 2, 30);
  const auto u1 = velocity_from_vorticity_torus(w1, ws);
  const auto u2 = velocity_from_vorticity_torus(w2, ws);
  CHECK(divergence_residual(u1, ws) <= 1e-12);
  CHECK(curl_residual(u1, w1, ws) <= 1e-12);
  CHECK(curl_residual(u2, w2, ws) <= 1e-12);
  CHECK(divergence_residual(VectorField2D::zeros(g), ws) == 0.0);

  const auto u12 = velocity_from_vorticity_torus(w1.scaled(2.0).plus(w2.scaled(-3.0)), ws);
  double lin = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    lin = std::max(lin, std::abs(u12.u1()[k] - (2.0 * u1.u1()[k] - 3.0 * u2.u1()[k])));
  CHECK(lin <= 1e-12 * u12.max_magnitude());

  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) sum += u1.u1()[k] * u1.u1()[k] + u1.u2()[k] * u1.u2()[k];
  const double direct = 0.5 * sum * g.hx() * g.hy();
  CHECK(energy(w1, ws) == doctest::Approx(direct).epsilon(1e-12));

  const StreamFunction sf = stream_from_vorticity(taylor_green(g), ws);
  for (int k = 0; k < 10; ++k) {
    const Point x = g.node(11 * k, 5 * k + 3);
    const std::size_t idx = sf.psi.index(11 * k, 5 * k + 3);
    CHECK(sf.psi.values()[idx] == doctest::Approx(std::sin(x.x) * std::sin(x.y)).scale(1.0).epsilon(1e-12));
    CHECK(sf.psi_xy.values()[idx] == doctest::Approx(std::cos(x.x) * std::cos(x.y)).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("direct plane kernel") {
  const GridSpec win = GridSpec::window(128, 128, {-0.5 * kTwoPi, -0.5 * kTwoPi}, kTwoPi, kTwoPi);
  const double R = 0.5;
  const auto bump = radial_bump(win, {0, 0}, R);
  SUBCASE("zero") { CHECK(velocity_from_vorticity_direct(ScalarField2D::zeros(win)).max_magnitude() == 0.0); }
  SUBCASE("far field follows the circulation") {
    const auto u = velocity_from_vorticity_direct(bump);
    double mass = 0.0;
    for (double v : bump.values()) mass += v * win.hx() * win.hy();
    CHECK(mass == doctest::Approx(radial_bump_mass(R)).epsilon(2e-3));
    int checked = 0;
    for (int j = 0; j < 128; ++j)
      for (int i = 0; i < 128; ++i) {
        const double rho = norm(win.node(i, j));
        if (std::abs(rho - 3.0 * R) > win.hx()) continue;
        const std::size_t k = bump.index(i, j);
        const double expect = mass / (kTwoPi * rho);
        CHECK(std::hypot(u.u1()[k], u.u2()[k]) == doctest::Approx(expect).epsilon(0.02));
        ++checked;
      }
    CHECK(checked > 10);
  }
  SUBCASE("agrees with the torus inversion on the support") {
    const auto ud = velocity_from_vorticity_direct(bump);
    const GridSpec tor = GridSpec::torus(128, 128);
    SpectralWorkspace ws(tor);
    const ScalarField2D tb(tor, std::vector<double>(bump.values().begin(), bump.values().end()));
    const auto ut = velocity_from_vorticity_torus(tb.minus_mean(), ws);
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < tor.size(); ++k) {
      if (bump.values()[k] == 0.0) continue;
      diff = std::max(diff, std::hypot(ud.u1()[k] - ut.u1()[k], ud.u2()[k] - ut.u2()[k]));
      scale = std::max(scale, std::hypot(ud.u1()[k], ud.u2()[k]));
    }
    CHECK(diff <= 0.05 * scale);
  }
  SUBCASE("rejected inputs") {
    CHECK_THROWS_AS(velocity_from_vorticity_direct(ScalarField2D::constant(win, 1.0)), Error);
    const GridSpec big = GridSpec::window(512, 512, {-1, -1}, 2, 2);
    CHECK_THROWS_AS(velocity_from_vorticity_direct(radial_bump(big, {0, 0}, 0.2)), Error);
    CHECK_THROWS_AS(velocity_from_vorticity_direct(taylor_green(GridSpec::torus(64, 64))), Error);
  }
}
