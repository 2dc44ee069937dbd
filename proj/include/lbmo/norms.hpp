#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lbmo/field.hpp"

namespace lbmo {

/// Minimum number of lattice nodes a ball must cover before its average is
/// trusted.
inline constexpr std::size_t kMinBallNodes = 25;

/// Finite stand-in for "all balls": dyadic radii 2^-j (0 <= j <= j_max) with a
/// seeded low-discrepancy center set, plus every admissible (outer, inner)
/// pair, i.e. r_outer <= 1 and |x_outer - x_inner| + 2 r_inner <= r_outer.
struct BallFamily {
  GridSpec grid;
  std::vector<Ball> balls;
  std::vector<int> scale;  // dyadic exponent j of each ball
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (outer, inner)
  double r_min = 1.0;
  double r_max = 1.0;
  int j_max = 0;
  int centers_per_scale = 0;
  std::uint64_t seed = 0;
};

BallFamily make_ball_family(const GridSpec& grid, int j_max, int centers_per_scale, std::uint64_t seed);

/// Largest j_max for which every ball of make_ball_family(grid, j_max, ...)
/// covers at least kMinBallNodes nodes; -1 if even j_max = 0 fails.
int max_admissible_j_max(const GridSpec& grid, int centers_per_scale, std::uint64_t seed);

/// Nodes strictly inside the ball: periodic distance on a torus, Euclidean
/// (and clipped to the box) on a window.
std::size_t nodes_in_ball(const GridSpec& grid, const Ball& ball);

/// Mean of the node values inside the ball; throws below kMinBallNodes.
double ball_average(const ScalarField2D& field, const Ball& ball);
/// Averages of every ball of the family, in family order.
std::vector<double> ball_averages(const ScalarField2D& field, const BallFamily& fam);

/// 1 + ln((1 - ln r_inner) / (1 - ln r_outer)).
double lbmo_denominator(double r_outer, double r_inner);

/// max over balls of the mean absolute deviation from the ball average.
double bmo_estimate(const ScalarField2D& field, const BallFamily& fam);

/// max over pairs of |av_inner - av_outer| / lbmo_denominator(r_outer, r_inner).
double lbmo_second_term(const ScalarField2D& field, const BallFamily& fam);

struct NormReport {
  std::map<double, double> lp;  // p -> ||f||_p (infinity allowed as a key)
  double bmo = 0.0;
  double lbmo_second_term = 0.0;
  double lbmo = 0.0;  // bmo + lbmo_second_term
  std::optional<double> ll;
  std::size_t ball_count = 0;
  std::size_t pair_count = 0;
  std::string grid_id;

  /// Flat JSON object (lp keys are "lp2", "lp1.5", "lpinf").
  std::string to_json() const;
  /// "t,lp2,bmo,lbmo2,lbmo,ll" row (ll empty when absent).
  std::string csv_row(double t) const;
  static std::string csv_header();
};

/// Composes lp_norm for each p, bmo_estimate and lbmo_second_term.
NormReport lbmo_estimate(const ScalarField2D& field, const BallFamily& fam, const std::vector<double>& ps = {2.0});

/// Lower bound of sup |v(x)-v(y)| / (|x-y| (1 + |ln|x-y||)) over adjacent
/// nodes of a decimated sublattice and seeded random pairs at dyadic
/// separations. The pair set for a larger budget contains the smaller one.
double ll_norm_estimate(const VectorField2D& vel, std::size_t pair_budget, std::uint64_t seed);

/// max over pairs of |av_inner - av_outer| / (ln(1 + r_outer/r_inner) * bmo).
double check_two_ball_bound(const ScalarField2D& field, const BallFamily& fam);

}  // namespace lbmo
