// lbmo-euler: command-line front end for the verification scenarios.
//
// Exit codes: 0 every verdict passes, 1 a verdict fails, 2 usage or I/O
// error, 3 numerical abort.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "lbmo/biot_savart.hpp"
#include "lbmo/csv.hpp"
#include "lbmo/error.hpp"
#include "lbmo/euler.hpp"
#include "lbmo/f2d.hpp"
#include "lbmo/field_ops.hpp"
#include "lbmo/flow.hpp"
#include "lbmo/norms.hpp"
#include "lbmo/report.hpp"
#include "lbmo/scenarios.hpp"

namespace fs = std::filesystem;
using namespace lbmo;

namespace {

std::string scenario_list() {
  std::string s;
  for (const auto& k : known_scenarios()) s += (s.empty() ? "" : ", ") + k;
  return s;
}

int finish(const ScenarioResult& r) {
  std::cout << r.report.dump(2) << '\n';
  std::cerr << r.scenario << ": " << r.verdict << " (" << r.out_dir.string() << ")\n";
  return verdict_exit_code(r.verdict);
}

int cmd_norms(const std::string& file, std::optional<int> j_max, int centers, std::uint64_t seed,
              const std::string& domain, const std::vector<double>& ps, std::size_t ll_budget) {
  std::optional<Domain> dom;
  if (!domain.empty()) dom = domain_from_string(domain);
  const auto recs = f2d::read_all(file, dom);
  if (recs.empty()) throw Error(file + " holds no F2D record");
  const ScalarField2D f(recs.front().grid, recs.front().values);
  int j = j_max.value_or(std::min(4, max_admissible_j_max(f.grid(), centers, seed)));
  if (j < 1) throw Error("grid " + f.grid().id() + " is too coarse for a ball family with admissible pairs");
  const BallFamily fam = make_ball_family(f.grid(), j, centers, seed);
  NormReport rep = lbmo_estimate(f, fam, ps);
  if (recs.size() >= 2) {
    const VectorField2D u(recs[0].grid, recs[0].values, recs[1].values);
    rep.ll = ll_norm_estimate(u, ll_budget, seed);
  } else if (f.grid().is_torus() && f.grid().power_of_two() && std::abs(f.mean()) <= 1e-12 * f.max_abs()) {
    SpectralWorkspace ws(f.grid());
    rep.ll = ll_norm_estimate(velocity_from_vorticity_torus(f, ws), ll_budget, seed);
  }
  std::cout << rep.to_json() << '\n';
  return 0;
}

int cmd_flow(const fs::path& dir, const std::vector<double>& times, int seeds_n, std::optional<double> dt,
             std::size_t budget, std::uint64_t seed) {
  const auto diag = csv::Table::read(dir / "diagnostics.csv");
  const auto ts = diag.numeric("t");
  std::vector<ScalarField2D> frames;
  std::vector<double> ft;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.f2d", k);
    const fs::path p = dir / "frames" / name;
    if (!fs::exists(p)) throw Error("flow: missing frame " + p.string() + " (run with store_snapshots)");
    frames.push_back(f2d::read_scalar(p, Domain::torus));
    ft.push_back(ts[k]);
  }
  if (frames.empty()) throw Error("flow: run directory has no frames");
  const VelocitySeries vel = snapshot_series(ft, frames);
  const GridSpec& g = vel.grid();
  const GridSpec seeds = GridSpec::window(seeds_n, seeds_n, {g.ox + 0.25 * g.lx, g.oy + 0.25 * g.ly}, 0.5 * g.lx,
                                          0.5 * g.ly);
  const double step = dt.value_or(std::min(1e-3, max_flow_dt(vel, seeds)));
  FlowModulusOptions opt;
  opt.ll_pair_budget = budget;
  opt.star_pair_budget = budget;
  opt.seed = seed;
  csv::Table t;
  t.header = {"t", "star", "bound", "ratio"};
  for (const auto& r : check_flow_modulus(vel, seeds, step, times, opt))
    t.add_row({csv::num(r.t), csv::num(r.star), csv::num(r.bound), csv::num(r.ratio)});
  t.write(dir / "flow.csv");
  std::cout << t.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lbmo-euler: numerical checks for 2D Euler with LBMO vorticity"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run the scenario described by a TOML or JSON config");
  std::string config_path, run_out;
  run_cmd->add_option("config", config_path, "config file (.toml or .json)")->required();
  run_cmd->add_option("--out", run_out, "override out_dir");

  auto* norms_cmd = app.add_subcommand("norms", "norm estimates of an F2D field, as JSON");
  std::string field_path, domain;
  std::optional<int> j_max;
  int centers = 16;
  std::uint64_t seed = 0;
  std::vector<double> ps{2.0};
  std::size_t ll_budget = 20000;
  norms_cmd->add_option("field", field_path, "F2D file (scalar, or two records for a velocity)")->required();
  norms_cmd->add_option("--j-max", j_max, "deepest dyadic scale of the ball family");
  norms_cmd->add_option("--centers", centers, "centers per scale")->check(CLI::PositiveNumber);
  norms_cmd->add_option("--seed", seed, "family and pair seed");
  norms_cmd->add_option("--domain", domain, "torus or window (default: inferred from the origin)")
      ->check(CLI::IsMember({"torus", "window"}));
  norms_cmd->add_option("--p", ps, "Lp exponents")->delimiter(',');
  norms_cmd->add_option("--ll-budget", ll_budget, "pair budget of the LL estimate");

  auto* flow_cmd = app.add_subcommand("flow", "flow-map modulus against the LL bound for a stored run");
  std::string run_dir;
  std::vector<double> times;
  int seeds_n = 48;
  std::optional<double> flow_dt;
  std::size_t flow_budget = 20000;
  flow_cmd->add_option("run_dir", run_dir, "directory written by a solver run with snapshots")->required();
  flow_cmd->add_option("--times", times, "comma-separated times")->delimiter(',')->required();
  flow_cmd->add_option("--seeds", seeds_n, "seed lattice side")->check(CLI::Range(8, 4096));
  flow_cmd->add_option("--dt", flow_dt, "trajectory step");
  flow_cmd->add_option("--budget", flow_budget, "pair budget");
  flow_cmd->add_option("--seed", seed, "pair seed");

  auto* verify_cmd = app.add_subcommand("verify", "run a scenario with its default configuration");
  std::string scenario, verify_out;
  std::uint64_t verify_seed = 0;
  verify_cmd->add_option("scenario", scenario, "one of: " + scenario_list())->required();
  verify_cmd->add_option("--seed", verify_seed, "experiment seed");
  verify_cmd->add_option("--out", verify_out, "output directory (default out/<scenario>)");

  auto* report_cmd = app.add_subcommand("report", "aggregate report.json files into summary.json");
  std::string report_dir;
  report_cmd->add_option("out_dir", report_dir, "directory to scan")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      if (!run_out.empty()) cfg.out_dir = run_out;
      return finish(run_scenario(cfg));
    }
    if (*norms_cmd) return cmd_norms(field_path, j_max, centers, seed, domain, ps, ll_budget);
    if (*flow_cmd) return cmd_flow(run_dir, times, seeds_n, flow_dt, flow_budget, seed);
    if (*verify_cmd) {
      if (!is_known_scenario(scenario)) {
        std::cerr << "unknown scenario '" << scenario << "'; known scenarios: " << scenario_list() << '\n';
        return 2;
      }
      ExperimentConfig cfg = default_config(scenario, verify_seed);
      if (!verify_out.empty()) cfg.out_dir = verify_out;
      return finish(run_scenario(cfg));
    }
    if (*report_cmd) {
      const Json s = aggregate_reports(report_dir);
      std::cout << s.dump(2) << '\n';
      return s.at("all_pass").get<bool>() ? 0 : 1;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
