// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lbmo/biot_savart.hpp"
#include "lbmo/config.hpp"
#include "lbmo/csv.hpp"
#include "lbmo/euler.hpp"
#include "lbmo/field_ops.hpp"
#include "lbmo/flow.hpp"
#include "lbmo/map_zoo.hpp"
#include "lbmo/norms.hpp"
#include "lbmo/scenarios.hpp"
#include "lbmo/test_fields.hpp"

using namespace lbmo;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path g_out = "acceptance_out";

ScenarioResult scenario(const std::string& name, const std::string& sub = "") {
  ExperimentConfig c = default_config(name, 0);
  c.out_dir = g_out / (sub.empty() ? name : sub + "/" + name);
  fs::remove_all(c.out_dir);
  return run_scenario(c);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

double max_diff(const VectorField2D& u, const VectorField2D& v) {
  double d = 0.0;
  for (std::size_t k = 0; k < u.grid().size(); ++k)
    d = std::max({d, std::abs(u.u1()[k] - v.u1()[k]), std::abs(u.u2()[k] - v.u2()[k])});
  return d;
}

Outcome biot_savart_exactness() {
  const auto t0 = Clock::now();
  const GridSpec g = GridSpec::torus(128, 128);
  SpectralWorkspace ws(g);
  const auto mode = sample_analytic(g, [](Point x) { return std::cos(x.x); });
  const auto mode_u = sample_analytic(g, [](Point x) { return Point{0.0, std::sin(x.x)}; });
  const auto tg_u = sample_analytic(
      g, [](Point x) { return Point{-std::sin(x.x) * std::cos(x.y), std::cos(x.x) * std::sin(x.y)}; });
  const double e1 = max_diff(velocity_from_vorticity_torus(mode, ws), mode_u) / mode_u.max_magnitude();
  const double e2 = max_diff(velocity_from_vorticity_torus(taylor_green(g), ws), tg_u) / tg_u.max_magnitude();
  const double secs = seconds_since(t0);
  return {e1 <= 1e-10 && e2 <= 1e-10 && secs < 1.0,
          fmt("single-mode rel err %.2e, Taylor-Green rel err %.2e, %.3f s", e1, e2, secs)};
}

Outcome stationary_fidelity() {
  const auto t0 = Clock::now();
  SolverConfig c;
  c.grid = GridSpec::torus(128, 128);
  c.dt = 1e-3;
  c.t_final = 1.0;
  c.diag_every = 100;
  c.store_snapshots = true;
  const auto w0 = taylor_green(c.grid);
  const RunRecord rec = run(w0, c);
  const ScalarField2D& w1 = rec.snapshots.back();
  const double drift = lp_norm(w1.plus(w0.scaled(-1.0)), 2.0) / lp_norm(w0, 2.0);
  const double secs = seconds_since(t0);
  return {drift <= 1e-6 && secs < 60.0, fmt("||w(1) - w0||_2 / ||w0||_2 = %.2e, %.1f s", drift, secs)};
}

Outcome conservation() {
  const ScenarioResult r = scenario("conservation");
  const auto& d = r.report.at("details");
  return {r.verdict == "pass", fmt("256^2, T=1: L2 drift %.2e, mean drift %.2e", d.at("lp2_drift").get<double>(),
                                   d.at("mean_drift").get<double>())};
}

Outcome modulus_axioms() {
  const GridSpec seeds = default_zoo_seeds();
  bool ok = true;
  const double id = star_modulus(sample_map(identity_map(), seeds), 20000, 0).star;
  ok = ok && id == 1.0;
  double rot_worst = 0.0;
  for (int q = 1; q < 4; ++q) {
    const double s = star_modulus(sample_map(rotation_map(q * std::numbers::pi / 2), seeds), 20000, 0).star;
    ok = ok && s == 1.0;
  }
  for (double a : {0.3, 0.7, 2.0, 5.5})
    rot_worst = std::max(rot_worst, std::abs(star_modulus(sample_map(rotation_map(a), seeds), 20000, 0).star - 1.0));
  ok = ok && rot_worst <= 1e-12;

  bool symmetric = true;
  double worst_violation = -INFINITY;
  std::size_t maps = 0;
  for (const AnalyticMap& m : default_zoo()) {
    const SampledMap s = sample_map(m, seeds);
    const auto pairs = stratified_pairs(s, 100000, 0);
    std::vector<MappedPair> swapped;
    swapped.reserve(pairs.size());
    for (const auto& p : pairs) swapped.push_back(p.swapped());
    const double fwd = modulus_over_pairs(pairs).star;
    symmetric = symmetric && fwd == modulus_over_pairs(swapped).star;
    worst_violation = std::max(worst_violation, check_p1_bounds(s, 1.1 * fwd, 100000, 0));
    ++maps;
  }
  ok = ok && symmetric && worst_violation <= 0.0;
  return {ok, fmt("identity and quarter turns exactly 1, other rotations within %.1e; inverse symmetric: %s; "
                  "worst case-bound violation %.3g over %zu maps x 1e5 pairs",
                  rot_worst, symmetric ? "yes" : "no", worst_violation, maps)};
}

Outcome g_phi_identity() {
  double worst = 0.0;
  for (int a = 0; a < 100; ++a)
    for (int b = 0; b < 100; ++b) {
      const double r = std::exp(-20.0 + 40.0 * a / 99.0), s = std::exp(-20.0 + 40.0 * b / 99.0);
      if ((1.0 - s) * (1.0 - r) < 0.0) continue;
      const double p = phi(r, s);
      worst = std::max(worst, std::abs(std::exp(std::abs(g_of(s) - g_of(r))) - p) / p);
    }
  return {worst <= 1e-12, fmt("max rel deviation %.2e on a 100x100 log grid", worst)};
}

Outcome ss_estimate() {
  const auto t0 = Clock::now();
  double k = 0.0;
  for (int p = -20; p <= 10; ++p)
    for (int m = 1; m <= 64; ++m) {
      const double r = std::ldexp(1.0, p);
      const double lhs = std::abs(std::log((1.0 + std::abs(std::log(g_psi(r, m)))) / (1.0 + std::abs(std::log(r)))));
      k = std::max(k, lhs / (1.0 + std::log(1.0 + m)));
    }
  const double secs = seconds_since(t0);
  return {k < 4.0 && secs < 1.0, fmt("fitted K = %.4f, %.4f s", k, secs)};
}

Outcome flow_bound() {
  const ScenarioResult r = scenario("flow-modulus");
  const auto& d = r.report.at("details");
  return {r.verdict == "pass", fmt("max star/bound %.4f, %zu estimator-gap warnings", d.at("max_ratio").get<double>(),
                                   d.at("estimator_gap_warnings").size())};
}

Outcome ladder() {
  const auto t0 = Clock::now();
  const ScenarioResult r = scenario("lbmo-example");
  const double secs = seconds_since(t0);
  const auto& d = r.report.at("details");
  const csv::Table t = csv::Table::read(r.out_dir / "trend.csv");
  const auto n = t.numeric("n");
  return {r.verdict == "pass" && d.at("sup_unbounded").get<bool>() && secs < 600.0,
          fmt("top rung %.0f^2, sup increasing: %s, last lbmo change %.3f, %.1f s", n.back(),
              d.at("sup_unbounded").get<bool>() ? "yes" : "no", d.at("lbmo_last_rel_change").get<double>(), secs)};
}

Outcome convolution_stability() {
  const GridSpec w = GridSpec::window(1024, 1024, {-1, -1}, 2, 2);
  const auto f = lbmo_example(w);
  const BallFamily fam = make_ball_family(w, 5, 16, 0);
  const double base = lbmo_estimate(f, fam).lbmo;
  const double m8 = lbmo_estimate(mollify(f, 8), fam).lbmo;
  const double m16 = lbmo_estimate(mollify(f, 16), fam).lbmo;
  return {m8 <= 1.05 * base && m16 <= 1.05 * base,
          fmt("lbmo(f) %.4f, n=8: %.4f, n=16: %.4f", base, m8, m16)};
}

Outcome composition() {
  const ScenarioResult r = scenario("composition");
  const auto& d = r.report.at("details");
  double worst = 0.0;
  for (const auto& [field, v] : d.at("per_field").items()) worst = std::max(worst, v.at("max_over_median").get<double>());
  return {r.verdict == "pass", fmt("worst max/median R %.3f, star span %.2f, Lp max rel diff %.2e", worst, d.at("star_span").get<double>(),
                                   d.at("lp_max_rel_diff").get<double>())};
}

Outcome growth() {
  const ScenarioResult r = scenario("growth");
  const auto& d = r.report.at("details");
  if (r.verdict == "skip") return {false, "skipped: " + d.at("reason").get<std::string>()};
  return {r.verdict == "pass", fmt("fit a=%.4f b=%.4g, max positive residual %.3g", d.at("a").get<double>(),
                                   d.at("b").get<double>(), d.at("max_positive_residual").get<double>())};
}

Outcome determinism() {
  std::vector<std::string> differing;
  std::size_t files = 0;
  for (const std::string& s : known_scenarios()) {
    const fs::path first = g_out / s;
    if (!fs::exists(first / "run.json")) scenario(s);
    scenario(s, "rerun");
    for (const auto& e : fs::recursive_directory_iterator(first)) {
      if (e.path().extension() != ".csv") continue;
      const fs::path other = g_out / "rerun" / s / fs::relative(e.path(), first);
      ++files;
      if (slurp(e.path()) != slurp(other)) differing.push_back(s + "/" + e.path().filename().string());
    }
  }
  std::string list;
  for (const auto& d : differing) list += " " + d;
  return {differing.empty() && files >= known_scenarios().size(),
          fmt("%zu CSV files compared across %zu scenarios, %zu differ%s", files, known_scenarios().size(),
              differing.size(), list.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--out") == 0) g_out = argv[i + 1];
  fs::create_directories(g_out);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Biot-Savart exactness", biot_savart_exactness},
      {"stationary-solution fidelity", stationary_fidelity},
      {"conservation", conservation},
      {"modulus axioms", modulus_axioms},
      {"g/phi identity", g_phi_identity},
      {"log-ratio estimate K < 4", ss_estimate},
      {"flow bound", flow_bound},
      {"LBMO refinement ladder", ladder},
      {"convolution stability", convolution_stability},
      {"composition", composition},
      {"growth envelope", growth},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
