#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbmo/biot_savart.hpp"
#include "lbmo/csv.hpp"
#include "lbmo/error.hpp"
#include "lbmo/field.hpp"
#include "lbmo/flow.hpp"
#include "lbmo/norms.hpp"

namespace lbmo {

inline constexpr double kCflSafety = 0.5;

struct SolverConfig {
  GridSpec grid;
  double dt = 1e-3;
  double t_final = 1.0;
  bool dealias = true;
  int diag_every = 100;
  std::optional<int> mollify_n;
  double p = 1.5;  // the extra Lp exponent reported next to 2 and infinity
  bool store_snapshots = false;
  std::size_t ll_pair_budget = 4000;
  std::uint64_t seed = 0;

  /// t_final / dt, which must be an integer (to 1e-9 relative).
  int steps() const;
  /// Grid, dt, t_final, diag_every (must divide the step count) and p.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

struct DiagnosticRow {
  double t = 0.0;
  double lp2 = 0.0, lp_p = 0.0, lp_inf = 0.0;
  double bmo = 0.0, lbmo2 = 0.0, lbmo = 0.0;  // nan when run without a family
  double ll = 0.0;
  double energy = 0.0;
  double mean = 0.0;
};

struct RunRecord {
  SolverConfig cfg;
  std::vector<double> times;               // diagnostic times
  std::vector<DiagnosticRow> diagnostics;  // one per time
  std::vector<double> snapshot_times;
  std::vector<ScalarField2D> snapshots;
  std::size_t steps_done = 0;

  /// Schema "t,lp2,lpP,lpInf,bmo,lbmo2,lbmo,ll,energy,mean".
  csv::Table diagnostics_table() const;
  /// run.json (the keys of `provenance` plus "solver" and "steps_done"),
  /// diagnostics.csv and, when
  /// snapshots were kept, frames/NNNN.f2d.
  void save(const std::filesystem::path& dir, const nlohmann::ordered_json& provenance = {}) const;
};

/// Non-finite state: carries the failing step and whatever was recorded up to
/// the last good step.
class SolverAbort : public NumericalError {
 public:
  SolverAbort(const std::string& what, std::size_t step, std::shared_ptr<RunRecord> partial,
              std::optional<ScalarField2D> last_good)
      : NumericalError(what), step(step), partial(std::move(partial)), last_good(std::move(last_good)) {}
  std::size_t step;
  std::shared_ptr<RunRecord> partial;
  std::optional<ScalarField2D> last_good;
};

/// -u . grad omega, with the product's spectrum cut by the 2/3 rule when
/// `dealias`; the zero mode of the result is exactly zero.
ScalarField2D rhs(const ScalarField2D& omega, SpectralWorkspace& ws, bool dealias = true);

/// One classical RK4 step of signed size dt. Throws NumericalError when
/// |dt| > 0.5 h / max|u| for the current state.
ScalarField2D step_rk4(const ScalarField2D& omega, SpectralWorkspace& ws, double dt, bool dealias = true);

/// Zeroes the modes removed by the 2/3 rule.
ScalarField2D dealias_truncate(const ScalarField2D& omega, SpectralWorkspace& ws);

/// Integrates omega0 (zero mean) to cfg.t_final, mollifying first when
/// cfg.mollify_n is set and truncating to the dealiased band when
/// cfg.dealias. Diagnostics every cfg.diag_every steps, including t = 0;
/// norms on `fam` are skipped (nan) when it is null.
RunRecord run(const ScalarField2D& omega0, const SolverConfig& cfg, const BallFamily* fam = nullptr);

struct ConservationReport {
  double lp2 = 0.0;     // max_t |a(t) - a(0)| / |a(0)|
  double lp_p = 0.0;
  double mean = 0.0;    // max_t |mean(t) - mean(0)| / max|omega_0|
  double energy = 0.0;
};

/// Relative drifts over the diagnostic rows; 0/0 reads as 0.
ConservationReport conservation_report(const RunRecord& rec);

/// Velocity of each stored snapshot.
std::vector<VectorField2D> snapshot_velocities(const RunRecord& rec);

/// The stored snapshots as a stream-interpolated velocity series.
VelocitySeries snapshot_series(const std::vector<double>& times, const std::vector<ScalarField2D>& snapshots);

}  // namespace lbmo
