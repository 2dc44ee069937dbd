#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lbmo/biot_savart.hpp"
#include "lbmo/csv.hpp"
#include "lbmo/euler.hpp"
#include "lbmo/f2d.hpp"
#include "lbmo/field_ops.hpp"
#include "lbmo/flow.hpp"
#include "lbmo/test_fields.hpp"

using namespace lbmo;
namespace fs = std::filesystem;

namespace {

double rel_l2(const ScalarField2D& a, const ScalarField2D& b) {
  return lp_norm(a.plus(b.scaled(-1.0)), 2.0) / lp_norm(b, 2.0);
}

ScalarField2D evolve(ScalarField2D w, SpectralWorkspace& ws, double dt, int steps) {
  for (int s = 0; s < steps; ++s) w = step_rk4(w, ws, dt);
  return w;
}

SolverConfig config(int n, double dt, double t_final, int diag_every) {
  SolverConfig c;
  c.grid = GridSpec::torus(n, n);
  c.dt = dt;
  c.t_final = t_final;
  c.diag_every = diag_every;
  return c;
}

double cfl_limit(const ScalarField2D& w, SpectralWorkspace& ws) {
  return kCflSafety * w.grid().h_max() / velocity_from_vorticity_torus(w, ws).max_magnitude();
}

}  // namespace

TEST_CASE("right-hand side") {
  const GridSpec g = GridSpec::torus(128, 128);
  SpectralWorkspace ws(g);
  CHECK(rhs(taylor_green(g), ws).max_abs() <= 1e-12);
  CHECK(rhs(sample_analytic(g, [](Point x) { return std::cos(x.x); }), ws).max_abs() <= 1e-12);
  CHECK(rhs(ScalarField2D::zeros(g), ws).max_abs() == 0.0);
  const auto r = rhs(two_mode_field(g), ws);
  CHECK(r.max_abs() > 1e-3);
  CHECK(std::abs(r.mean()) <= 1e-16 * r.max_abs() * g.size());
  CHECK_THROWS_AS(rhs(ScalarField2D::constant(g, 1.0), ws), Error);
}

TEST_CASE("dealias truncation") {
  const GridSpec g = GridSpec::torus(32, 32);
  SpectralWorkspace ws(g);
  const auto low = sample_analytic(g, [](Point x) { return std::cos(3 * x.x) * std::sin(5 * x.y); });
  const auto high = sample_analytic(g, [](Point x) { return std::cos(11 * x.x); });
  CHECK(rel_l2(dealias_truncate(low, ws), low) <= 1e-14);
  CHECK(dealias_truncate(high, ws).max_abs() <= 1e-14);
}

TEST_CASE("RK4 step") {
  const GridSpec g = GridSpec::torus(128, 128);
  SpectralWorkspace ws(g);
  SUBCASE("stationary data") {
    const auto w = taylor_green(g);
    const auto next = step_rk4(w, ws, 1e-2);
    CHECK(next.plus(w.scaled(-1.0)).max_abs() <= 1e-10);
  }
  SUBCASE("zero stays zero") { CHECK(step_rk4(ScalarField2D::zeros(g), ws, 1e-2).max_abs() == 0.0); }
  SUBCASE("fourth order in time") {
    const auto w0 = dealias_truncate(two_mode_field(g), ws);
    const double dt = 0.02;
    const auto ref = evolve(w0, ws, dt / 8, 200);
    const double e1 = rel_l2(evolve(w0, ws, dt, 25), ref);
    const double e2 = rel_l2(evolve(w0, ws, dt / 2, 50), ref);
    MESSAGE("errors " << e1 << " " << e2 << " ratio " << e1 / e2);
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 20.0);
  }
  SUBCASE("time reversal") {
    const auto w0 = dealias_truncate(two_mode_field(g), ws);
    const auto fwd = evolve(w0, ws, 1e-3, 500);
    const auto back = evolve(fwd, ws, -1e-3, 500);
    CHECK(rel_l2(back, w0) <= 1e-5);
  }
  SUBCASE("CFL guard") {
    const auto w = two_mode_field(g);
    CHECK_THROWS_AS(step_rk4(w, ws, 1.01 * cfl_limit(w, ws)), NumericalError);
    CHECK_NOTHROW(step_rk4(w, ws, 0.99 * cfl_limit(w, ws)));
  }
}

TEST_CASE("solver runs") {
  SUBCASE("stationary data stays put") {
    const SolverConfig c = config(128, 1e-3, 0.1, 50);
    const RunRecord rec = run(taylor_green(c.grid), c);
    REQUIRE(rec.diagnostics.size() == 3);
    CHECK(rec.times == std::vector<double>{0.0, 0.05, 0.1});
    const ConservationReport cr = conservation_report(rec);
    CHECK(cr.lp2 <= 1e-10);
    CHECK(cr.lp_p <= 1e-10);
    CHECK(cr.mean <= 1e-10);
    CHECK(cr.energy <= 1e-10);
    CHECK(std::isnan(rec.diagnostics[0].bmo));
  }
  SUBCASE("zero data reports zero drift") {
    const SolverConfig c = config(64, 1e-2, 0.1, 5);
    const ConservationReport cr = conservation_report(run(ScalarField2D::zeros(c.grid), c));
    CHECK(cr.lp2 == 0.0);
    CHECK(cr.mean == 0.0);
  }
  SUBCASE("generic data conserves the mean exactly and the L2 norm closely") {
    SolverConfig c = config(128, 5e-3, 0.5, 20);
    const auto w0 = random_smooth(c.grid, 4, 4);
    const GridSpec g = c.grid;
    const BallFamily fam = make_ball_family(g, 2, 8, 0);
    const RunRecord rec = run(w0, c, &fam);
    const ConservationReport cr = conservation_report(rec);
    CHECK(cr.mean <= 1e-12);
    CHECK(cr.lp2 <= 1e-4);
    for (const auto& d : rec.diagnostics) {
      CHECK(std::isfinite(d.lbmo));
      CHECK(d.ll > 0.0);
      CHECK(d.lbmo == d.bmo + d.lbmo2);
    }
    // The dealiased L2 norm never grows.
    for (std::size_t k = 1; k < rec.diagnostics.size(); ++k)
      CHECK(rec.diagnostics[k].lp2 <= rec.diagnostics[k - 1].lp2 * (1 + 1e-12));
  }
  SUBCASE("dealiasing reduces the drift on rough data") {
    SolverConfig c = config(128, 2e-3, 0.5, 25);
    const auto w0 = random_smooth(c.grid, 7, 24);
    const double on = conservation_report(run(w0, c)).lp2;
    c.dealias = false;
    const double off = conservation_report(run(w0, c)).lp2;
    MESSAGE("drift on " << on << " off " << off);
    CHECK(on < off);
  }
  SUBCASE("rejected configurations") {
    const SolverConfig c = config(64, 1e-2, 0.1, 5);
    CHECK_THROWS_AS(run(ScalarField2D::constant(c.grid, 1.0), c), Error);
    CHECK_THROWS_AS(run(taylor_green(GridSpec::torus(32, 32)), c), Error);
    CHECK_THROWS_AS(config(64, 3e-2, 0.1, 1).validate(), Error);
    CHECK_THROWS_AS(config(64, 1e-2, 0.1, 3).validate(), Error);
    SolverConfig big = config(64, 0.5, 1.0, 1);
    CHECK_THROWS_AS(run(taylor_green(big.grid), big), Error);
    SolverConfig w = c;
    w.grid = GridSpec::torus(48, 48);
    CHECK_THROWS_AS(w.validate(), Error);
  }
}

TEST_CASE("solver abort keeps the partial record") {
  // dt sits just under the initial CFL limit; the flow speeds up and the
  // guard must trip mid-run rather than let the step through.
  const GridSpec g = GridSpec::torus(64, 64);
  SpectralWorkspace ws(g);
  const auto w0 = dealias_truncate(two_mode_field(g), ws);
  double dt = 0.999 * cfl_limit(w0, ws);
  SolverConfig c = config(64, dt, 400 * dt, 1);
  try {
    run(w0, c);
    FAIL("expected an abort");
  } catch (const SolverAbort& a) {
    REQUIRE(a.partial);
    CHECK(a.step > 0);
    CHECK(a.partial->diagnostics.size() == a.step);
    CHECK(a.last_good.has_value());
  }
}

TEST_CASE("run persistence") {
  const fs::path dir = fs::temp_directory_path() / "lbmo_unit_euler_save";
  fs::remove_all(dir);
  SolverConfig c = config(32, 1e-2, 0.2, 10);
  c.store_snapshots = true;
  const RunRecord rec = run(two_mode_field(c.grid), c);
  rec.save(dir, {{"label", "unit"}});
  CHECK(fs::exists(dir / "run.json"));
  const csv::Table t = csv::Table::read(dir / "diagnostics.csv");
  CHECK(t.header == std::vector<std::string>{"t", "lp2", "lpP", "lpInf", "bmo", "lbmo2", "lbmo", "ll", "energy", "mean"});
  CHECK(t.rows.size() == 3);
  REQUIRE(rec.snapshots.size() == 3);
  const auto back = f2d::read_scalar(dir / "frames" / "0002.f2d");
  for (std::size_t k = 0; k < back.size(); ++k) CHECK(back.values()[k] == rec.snapshots[2].values()[k]);
  std::ifstream js(dir / "run.json");
  const std::string text((std::istreambuf_iterator<char>(js)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"label\"") != std::string::npos);
  CHECK(text.find("\"steps_done\"") != std::string::npos);
}

TEST_CASE("flow of solver frames preserves measure") {
  SolverConfig c = config(128, 5e-3, 1.0, 20);
  c.store_snapshots = true;
  const RunRecord rec = run(two_mode_field(c.grid), c);
  const VelocitySeries vel = snapshot_series(rec.snapshot_times, rec.snapshots);
  CHECK(vel.stream_interpolated());
  const GridSpec seeds = GridSpec::window(16, 16, {0.25 * kTwoPi, 0.25 * kTwoPi}, 0.5 * kTwoPi, 0.5 * kTwoPi);
  const SampledMap m = integrate_flow(vel, seeds, 5e-3, 1.0);
  CHECK(m.jacobian_error <= kJacobianTolIntegrated);
  CHECK(m.inverse_error <= kInverseTolIntegrated);
}
