#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lbmo/field.hpp"

namespace lbmo {

// ---------------------------------------------------------------------------
// Distortion functionals

/// Phi(r, s): ratio max{(1+|ln s|)/(1+|ln r|), inverse} when r and s lie on
/// the same side of 1, product (1+|ln s|)(1+|ln r|) otherwise. Symmetric, >= 1.
double phi(double r, double s);

/// g(tau) = ln(1 + ln tau) for tau >= 1, -ln(1 - ln tau) below; increasing
/// with g(1) = 0.
double g_of(double tau);

/// Radius of the ball around psi(x0) that contains 4 psi(B(x0, r)):
/// 4 e^M r^M for r >= 1, 4 max{e r^(1/M), e^M r} below, M = ||psi||_*.
double g_psi(double r, double star);

// ---------------------------------------------------------------------------
// Sampled maps

enum class MapKind { analytic, integrated };
std::string to_string(MapKind k);

inline constexpr double kInverseTolAnalytic = 1e-10;
inline constexpr double kInverseTolIntegrated = 1e-4;
inline constexpr double kJacobianTolAnalytic = 1e-6;
inline constexpr double kJacobianTolIntegrated = 1e-3;

/// A measure-preserving map psi sampled on a window seed lattice:
/// forward[k] = psi(seed k), inverse[k] = psi^-1(seed k). Positions are plane
/// coordinates (flows on a torus are tracked unwrapped).
struct SampledMap {
  GridSpec seeds;
  std::vector<Point> forward;
  std::vector<Point> inverse;
  MapKind kind = MapKind::analytic;
  double inverse_error = 0.0;   // max |psi(psi^-1(x)) - x| over seeds
  double jacobian_error = 0.0;  // max |det D psi - 1| over seeds

  double inverse_tolerance() const;
  double jacobian_tolerance() const;
  /// Throws NumericalError when either recorded error exceeds its tolerance.
  void check_invariants() const;
  Point seed(std::size_t k) const;
  /// The same data read as psi^-1 (the Jacobian bound is carried over).
  SampledMap inverted() const;
};

/// Max |det J - 1| from central differences of `positions` on the interior
/// of the seed lattice.
double lattice_jacobian_deviation(const GridSpec& seeds, std::span<const Point> positions);

struct MappedPair {
  Point x, y;    // domain points
  Point fx, fy;  // their images
  MappedPair swapped() const { return {fx, fy, x, y}; }
};

struct ModulusReport {
  double star = 1.0;
  MappedPair argmax{};
  std::size_t pair_count = 0;
};

/// max Phi(|fx - fy|, |x - y|) over the given pairs (coincident pairs skipped).
ModulusReport modulus_over_pairs(std::span<const MappedPair> pairs);

/// Seed pairs stratified over dyadic separations from the lattice spacing to
/// the window diameter; deterministic in (map.seeds, budget, seed) and a
/// superset for a larger budget.
std::vector<MappedPair> stratified_pairs(const SampledMap& map, std::size_t pair_budget, std::uint64_t seed);

/// Lower bound of ||psi||_* from stratified_pairs.
ModulusReport star_modulus(const SampledMap& map, std::size_t pair_budget, std::uint64_t seed);

/// Worst relative violation of the three case bounds linking |x-y| and
/// |psi x - psi y| through M = star; <= 0 means every bound holds.
double p1_violation(const MappedPair& pair, double star);
double check_p1_bounds(const SampledMap& map, double star, std::size_t pair_budget, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Flow integration

/// Velocity frames at increasing times, linearly interpolated in time and
/// bilinearly in space. A single frame is a steady field valid for all t.
///
/// Torus frames built with from_stream instead interpolate the stream
/// function psi by bicubic Hermite (nodal psi, psi_x = u2, psi_y = -u1,
/// psi_xy) and return its exact perpendicular gradient: continuous and
/// exactly divergence-free, where the bilinear velocity interpolant carries
/// an O(h) divergence.
class VelocitySeries {
 public:
  VelocitySeries(std::vector<double> times, std::vector<VectorField2D> frames);
  static VelocitySeries steady(VectorField2D frame);
  static VelocitySeries from_stream(std::vector<double> times, std::vector<VectorField2D> frames,
                                    std::vector<ScalarField2D> psi, std::vector<ScalarField2D> psi_xy);
  bool stream_interpolated() const { return !psi_.empty(); }

  Point at(double t, Point x) const;
  bool steady() const { return frames_.size() == 1; }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  double max_speed() const { return max_speed_; }
  const GridSpec& grid() const { return frames_.front().grid(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<VectorField2D>& frames() const { return frames_; }

 private:
  std::vector<double> times_;
  std::vector<VectorField2D> frames_;
  std::vector<ScalarField2D> psi_, psi_xy_;
  double max_speed_ = 0.0;

  Point frame_at(std::size_t k, Point x) const;
};

/// Classical RK4 transport of `points` from t0 to t1 (t1 < t0 runs backward)
/// in equal steps of size at most dt.
std::vector<Point> advect(const VelocitySeries& vel, std::vector<Point> points, double t0, double t1, double dt);

enum class Direction { forward, backward };

/// Offset of the companion trajectories, in units of the seed spacing.
inline constexpr double kCompanionOffset = 1e-3;

/// Flow map psi_t (forward) or psi_t^-1 (backward) on the seed lattice.
/// Requires dt <= 0.5 * seed spacing / max|u|; both branches are integrated
/// and the SampledMap invariants are enforced afterwards. det D psi comes
/// from central differences of four companion trajectories per seed, so the
/// seed spacing does not enter it.
SampledMap integrate_flow(const VelocitySeries& vel, const GridSpec& seeds, double dt, double t,
                          Direction direction = Direction::forward);

/// psi_t for each of the nondecreasing `times`, advancing one forward
/// integration through all of them.
std::vector<SampledMap> integrate_flow_times(const VelocitySeries& vel, const GridSpec& seeds, double dt,
                                             const std::vector<double>& times);

/// Largest dt accepted by integrate_flow for this series and seed lattice.
double max_flow_dt(const VelocitySeries& vel, const GridSpec& seeds);

struct FlowModulusRow {
  double t = 0.0;
  double star = 1.0;
  double bound = 1.0;  // exp of the time integral of the LL estimate
  double ratio = 1.0;  // star / bound
};

struct FlowModulusOptions {
  std::size_t ll_pair_budget = 20000;
  std::size_t star_pair_budget = 20000;
  std::uint64_t seed = 0;
};

/// star_modulus(psi_t) against exp(int_0^t ll(tau) dtau) at each time, the
/// LL estimate integrated by the trapezoid rule over the series frames.
std::vector<FlowModulusRow> check_flow_modulus(const VelocitySeries& vel, const GridSpec& seeds, double dt,
                                               const std::vector<double>& times, const FlowModulusOptions& opt = {});

}  // namespace lbmo
