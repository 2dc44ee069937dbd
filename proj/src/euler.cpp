#include "lbmo/euler.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "lbmo/f2d.hpp"
#include "lbmo/field_ops.hpp"

namespace lbmo {

namespace {

using cplx = std::complex<double>;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Scratch for the right-hand side on raw arrays.
struct Rhs {
  SpectralWorkspace& ws;
  bool dealias;
  std::vector<cplx> hat, tmp;
  std::vector<double> u1, u2, g1, g2, prod;

  // Returns max |u| of the state.
  double operator()(const std::vector<double>& w, std::vector<double>& out) {
    const int mx = ws.modes_x();
    const int ny = ws.grid().ny;
    ws.forward(w, hat);
    velocity_from_spectrum(hat, ws, u1, u2);
    const cplx I(0.0, 1.0);
    tmp.assign(hat.size(), cplx{});
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < mx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * mx + i;
        if (!ws.nyquist(i, j)) tmp[k] = I * ws.kx(i) * hat[k];
      }
    ws.inverse(tmp, g1);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < mx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * mx + i;
        tmp[k] = ws.nyquist(i, j) ? cplx{} : I * ws.ky(j) * hat[k];
      }
    ws.inverse(tmp, g2);
    prod.resize(w.size());
    double umax = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      prod[k] = -(u1[k] * g1[k] + u2[k] * g2[k]);
      umax = std::max(umax, std::hypot(u1[k], u2[k]));
    }
    ws.forward(prod, tmp);
    tmp[0] = cplx{};
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < mx; ++i)
        if (ws.nyquist(i, j) || (dealias && !ws.dealias_keep(i, j))) tmp[static_cast<std::size_t>(j) * mx + i] = cplx{};
    ws.inverse(tmp, out);
    return umax;
  }
};

double cfl_limit(const GridSpec& g, double umax) {
  return umax == 0.0 ? std::numeric_limits<double>::infinity() : kCflSafety * std::min(g.hx(), g.hy()) / umax;
}

// Returns false when the step would violate the CFL bound; `limit` receives it.
bool rk4(Rhs& f, std::vector<double>& w, double dt, double& limit) {
  const std::size_t n = w.size();
  std::vector<double> k1, k2, k3, k4, s(n);
  const double umax = f(w, k1);
  limit = cfl_limit(f.ws.grid(), umax);
  if (std::abs(dt) > limit) return false;
  for (std::size_t k = 0; k < n; ++k) s[k] = w[k] + 0.5 * dt * k1[k];
  f(s, k2);
  for (std::size_t k = 0; k < n; ++k) s[k] = w[k] + 0.5 * dt * k2[k];
  f(s, k3);
  for (std::size_t k = 0; k < n; ++k) s[k] = w[k] + dt * k3[k];
  f(s, k4);
  for (std::size_t k = 0; k < n; ++k) w[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  return true;
}

double rel_drift(double a, double a0) {
  const double d = std::abs(a - a0);
  if (d == 0.0) return 0.0;
  return a0 == 0.0 ? d : d / std::abs(a0);
}

}  // namespace

int SolverConfig::steps() const {
  if (!(dt > 0.0) || !(t_final > 0.0)) throw Error("SolverConfig: dt and t_final must be positive");
  const double q = t_final / dt;
  const double n = std::round(q);
  if (std::abs(q - n) > 1e-9 * std::max(1.0, q)) throw Error("SolverConfig: t_final / dt must be an integer");
  return static_cast<int>(n);
}

void SolverConfig::validate() const {
  grid.validate();
  if (!grid.is_torus()) throw Error("SolverConfig: the solver runs on a torus grid");
  if (!grid.power_of_two()) throw Error("SolverConfig: grid sides must be powers of two");
  const int n = steps();
  if (diag_every < 1 || n % diag_every != 0)
    throw Error("SolverConfig: diag_every must be positive and divide the step count " + std::to_string(n));
  if (!(p >= 1.0)) throw Error("SolverConfig: p must be >= 1");
  if (mollify_n && *mollify_n < 1) throw Error("SolverConfig: mollify_n must be positive");
}

nlohmann::ordered_json SolverConfig::to_json() const {
  nlohmann::ordered_json j;
  j["grid"] = {{"nx", grid.nx}, {"ny", grid.ny}, {"lx", grid.lx}, {"ly", grid.ly}};
  j["dt"] = dt;
  j["t_final"] = t_final;
  j["dealias"] = dealias;
  j["diag_every"] = diag_every;
  j["mollify_n"] = mollify_n ? nlohmann::ordered_json(*mollify_n) : nlohmann::ordered_json(nullptr);
  j["p"] = p;
  j["store_snapshots"] = store_snapshots;
  j["ll_pair_budget"] = ll_pair_budget;
  j["seed"] = seed;
  return j;
}

csv::Table RunRecord::diagnostics_table() const {
  csv::Table t;
  t.header = {"t", "lp2", "lpP", "lpInf", "bmo", "lbmo2", "lbmo", "ll", "energy", "mean"};
  for (const auto& r : diagnostics)
    t.add_row({csv::num(r.t), csv::num(r.lp2), csv::num(r.lp_p), csv::num(r.lp_inf), csv::num(r.bmo),
               csv::num(r.lbmo2), csv::num(r.lbmo), csv::num(r.ll), csv::num(r.energy), csv::num(r.mean)});
  return t;
}

void RunRecord::save(const std::filesystem::path& dir, const nlohmann::ordered_json& provenance) const {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j = provenance.is_object() ? provenance : nlohmann::ordered_json::object();
  j["solver"] = cfg.to_json();
  j["steps_done"] = steps_done;
  std::ofstream os(dir / "run.json");
  if (!os) throw Error("cannot write " + (dir / "run.json").string());
  os << j.dump(2) << '\n';
  diagnostics_table().write(dir / "diagnostics.csv");
  if (!snapshots.empty()) {
    std::filesystem::create_directories(dir / "frames");
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "%04zu.f2d", k);
      f2d::write_scalar(dir / "frames" / name, snapshots[k]);
    }
  }
}

ScalarField2D rhs(const ScalarField2D& omega, SpectralWorkspace& ws, bool dealias) {
  if (!(omega.grid() == ws.grid())) throw Error("rhs: workspace grid mismatch");
  const double mean = omega.mean();
  if (std::abs(mean) > 1e-12 * omega.max_abs()) throw Error("rhs: vorticity must have zero mean");
  Rhs f{ws, dealias, {}, {}, {}, {}, {}, {}, {}};
  std::vector<double> w(omega.values().begin(), omega.values().end()), out;
  f(w, out);
  return ScalarField2D(omega.grid(), std::move(out));
}

ScalarField2D step_rk4(const ScalarField2D& omega, SpectralWorkspace& ws, double dt, bool dealias) {
  if (!(omega.grid() == ws.grid())) throw Error("step_rk4: workspace grid mismatch");
  Rhs f{ws, dealias, {}, {}, {}, {}, {}, {}, {}};
  std::vector<double> w(omega.values().begin(), omega.values().end());
  double limit = 0.0;
  if (!rk4(f, w, dt, limit))
    throw NumericalError("step_rk4: |dt| = " + csv::num(std::abs(dt)) + " exceeds the CFL limit " + csv::num(limit));
  for (double v : w)
    if (!std::isfinite(v)) throw NumericalError("step_rk4: state became non-finite");
  return ScalarField2D(omega.grid(), std::move(w));
}

ScalarField2D dealias_truncate(const ScalarField2D& omega, SpectralWorkspace& ws) {
  std::vector<cplx> hat;
  ws.forward(omega.values(), hat);
  const int mx = ws.modes_x();
  for (int j = 0; j < ws.grid().ny; ++j)
    for (int i = 0; i < mx; ++i)
      if (!ws.dealias_keep(i, j)) hat[static_cast<std::size_t>(j) * mx + i] = cplx{};
  std::vector<double> out;
  ws.inverse(hat, out);
  return ScalarField2D(omega.grid(), std::move(out));
}

RunRecord run(const ScalarField2D& omega0, const SolverConfig& cfg, const BallFamily* fam) {
  cfg.validate();
  if (!(omega0.grid() == cfg.grid)) throw Error("run: initial data grid " + omega0.grid().id() + " differs from config");
  if (fam && !(fam->grid == cfg.grid)) throw Error("run: ball family built for another grid");
  SpectralWorkspace ws(cfg.grid);
  ScalarField2D init = cfg.mollify_n ? mollify(omega0, *cfg.mollify_n) : omega0;
  if (cfg.dealias) init = dealias_truncate(init, ws);
  if (std::abs(init.mean()) > 1e-12 * init.max_abs()) throw Error("run: initial vorticity must have zero mean");
  {
    const VectorField2D u0 = velocity_from_vorticity_torus(init, ws);
    const double limit = cfl_limit(cfg.grid, u0.max_magnitude());
    if (cfg.dt > limit)
      throw Error("run: dt = " + csv::num(cfg.dt) + " exceeds the CFL limit " + csv::num(limit) + " of the initial data");
  }

  auto rec = std::make_shared<RunRecord>();
  rec->cfg = cfg;
  const int n = cfg.steps();
  std::vector<double> ps{2.0, cfg.p, kInfNorm};

  const auto diagnose = [&](const ScalarField2D& w, double t) {
    DiagnosticRow r;
    r.t = t;
    r.lp2 = lp_norm(w, 2.0);
    r.lp_p = lp_norm(w, cfg.p);
    r.lp_inf = lp_norm(w, kInfNorm);
    if (fam) {
      r.bmo = bmo_estimate(w, *fam);
      r.lbmo2 = lbmo_second_term(w, *fam);
      r.lbmo = r.bmo + r.lbmo2;
    } else {
      r.bmo = r.lbmo2 = r.lbmo = kNan;
    }
    const VectorField2D u = velocity_from_vorticity_torus(w.minus_mean(), ws);
    r.ll = ll_norm_estimate(u, cfg.ll_pair_budget, cfg.seed);
    r.energy = energy(w, ws);
    r.mean = w.mean();
    rec->times.push_back(t);
    rec->diagnostics.push_back(r);
    if (cfg.store_snapshots) {
      rec->snapshot_times.push_back(t);
      rec->snapshots.push_back(w);
    }
  };

  diagnose(init, 0.0);
  Rhs f{ws, cfg.dealias, {}, {}, {}, {}, {}, {}, {}};
  std::vector<double> w(init.values().begin(), init.values().end());
  std::vector<double> last_good = w;
  for (int s = 1; s <= n; ++s) {
    double limit = 0.0;
    if (!rk4(f, w, cfg.dt, limit))
      throw SolverAbort("run: CFL violated at step " + std::to_string(s) + " (dt " + csv::num(cfg.dt) + " > limit " +
                            csv::num(limit) + ")",
                        static_cast<std::size_t>(s), rec, ScalarField2D(cfg.grid, last_good));
    for (double v : w)
      if (!std::isfinite(v))
        throw SolverAbort("run: non-finite vorticity at step " + std::to_string(s), static_cast<std::size_t>(s), rec,
                          ScalarField2D(cfg.grid, last_good));
    rec->steps_done = static_cast<std::size_t>(s);
    last_good = w;
    if (s % cfg.diag_every == 0) diagnose(ScalarField2D(cfg.grid, w), s * cfg.dt);
  }
  return std::move(*rec);
}

ConservationReport conservation_report(const RunRecord& rec) {
  if (rec.diagnostics.size() < 2) throw Error("conservation_report: needs at least two diagnostic rows");
  const DiagnosticRow& r0 = rec.diagnostics.front();
  ConservationReport out;
  for (const auto& r : rec.diagnostics) {
    out.lp2 = std::max(out.lp2, rel_drift(r.lp2, r0.lp2));
    out.lp_p = std::max(out.lp_p, rel_drift(r.lp_p, r0.lp_p));
    out.energy = std::max(out.energy, rel_drift(r.energy, r0.energy));
    const double d = std::abs(r.mean - r0.mean);
    out.mean = std::max(out.mean, d == 0.0 ? 0.0 : (r0.lp_inf == 0.0 ? d : d / r0.lp_inf));
  }
  return out;
}

std::vector<VectorField2D> snapshot_velocities(const RunRecord& rec) {
  if (rec.snapshots.empty()) return {};
  SpectralWorkspace ws(rec.snapshots.front().grid());
  std::vector<VectorField2D> out;
  out.reserve(rec.snapshots.size());
  for (const auto& w : rec.snapshots) out.push_back(velocity_from_vorticity_torus(w.minus_mean(), ws));
  return out;
}

VelocitySeries snapshot_series(const std::vector<double>& times, const std::vector<ScalarField2D>& snapshots) {
  if (snapshots.empty()) throw Error("snapshot_series: no snapshots");
  SpectralWorkspace ws(snapshots.front().grid());
  std::vector<VectorField2D> u;
  std::vector<ScalarField2D> psi, pxy;
  for (const auto& w : snapshots) {
    const ScalarField2D w0 = w.minus_mean();
    u.push_back(velocity_from_vorticity_torus(w0, ws));
    StreamFunction sf = stream_from_vorticity(w0, ws);
    psi.push_back(std::move(sf.psi));
    pxy.push_back(std::move(sf.psi_xy));
  }
  return VelocitySeries::from_stream(times, std::move(u), std::move(psi), std::move(pxy));
}

}  // namespace lbmo
