#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "grushin/geodesic.hpp"
#include "grushin/metric.hpp"

namespace grushin {

/// A sampled pair with its certified bracket.
struct PairWitness {
  Point x;
  Point y;
  double lower = 0.0;
  double upper = 0.0;
};

struct HolderReport {
  double H_claimed = 0.0;
  std::size_t samples = 0;
  /// max upper(x,y) / d_E(x,y)^(1-beta).
  double worst_ratio = 0.0;
  /// max lower(x,y) / d_E(x,y)^(1-beta); a value above H_claimed proves a violation.
  double worst_certified_ratio = 0.0;
  /// Pairs whose bracket straddles H * d_E^(1-beta) even after running the solver.
  std::size_t unresolved = 0;
  bool violated = false;
  std::vector<PairWitness> violations;
};

struct TripleWitness {
  Point x;
  Point y;
  Point z;
  double t = 0.0;
  double eta = 0.0;
  /// lower(x,y) / upper(x,z).
  double ratio_lower = 0.0;
};

struct QuasisymmetryReport {
  double beta = 0.0;
  double H = 0.0;
  std::size_t triples_tested = 0;
  /// max over triples of lower(x,y)/upper(x,z) - eta(t); positive only for a certified
  /// violation.
  double worst_excess = 0.0;
  /// Triples proven to satisfy the bound (upper(x,y)/lower(x,z) <= eta(t)).
  std::size_t certified_ok = 0;
  std::size_t unresolved = 0;
  bool violated = false;
  std::vector<TripleWitness> violations;

  [[nodiscard]] double eta(double t) const;
};

struct DoublingReport {
  std::size_t balls_tested = 0;
  std::size_t D_estimate = 1;
  std::vector<std::size_t> counts;
  std::size_t grid_per_axis = 0;
};

struct CurvatureReport {
  std::vector<Point> points;
  std::vector<double> K_numeric;
  std::optional<std::vector<double>> K_closed_form;
  double A = 0.0;
  /// Smallest A with |K(x)| <= A d_Y(x,Y)^-2 over the samples.
  double A_fit = 0.0;
  bool violated = false;
  /// Candidate samples dropped for lying too close to Y or to the medial axis.
  std::size_t skipped = 0;
};

/// Balls of radius 2^(-n-2) packed along the strip [2^(-n-1), 2^(-n)] x [0, 1] in the
/// metric dx^2 + exp(2/|x|^eps) dy^2.
struct NondoublingReport {
  double eps = 0.0;
  int n = 0;
  std::uint64_t count = 0;
  /// floor(2^(n+1) exp(2^(n eps))).
  std::uint64_t required = 0;
  double radius = 0.0;
  double x_center = 0.0;
  double spacing = 0.0;
  /// Center heights (k + 1/2) * spacing; filled only for counts up to 10^5.
  std::vector<double> y_centers;
  /// Smallest certified lower bound on the distance between two centers.
  double min_pair_lower = 0.0;
  bool disjoint = false;
};

/// 2^beta C^(2-beta) N / (1-beta): a Hoelder constant for Y contained in a closed set whose
/// complement is N C-uniform domains.
double holder_constant_uniform(double C, int N, double beta);

/// ((1+2t)^(1-beta) - (2t)^(1-beta)) / (1-beta): the radial lower bound constant with
/// d_E(x,Y) <= 2t d_E(x,z).
double eta_radial_constant(double t, double beta);

/// max(H t^(1-beta) / c(t,beta), 2^beta (1 + 1/(2t))^beta t).
double eta_control(double beta, double H, double t);

/// Samples `samples` pairs and tests d_Y <= H d_E^(1-beta). Upper bounds come from the
/// straight segment, and from the solver at `resolution` when the segment does not settle
/// the pair.
HolderReport check_holder(const GrushinSpace& s, double H, std::size_t samples,
                          std::uint64_t seed, double resolution = 0.05);

/// Tests d_Y(x,y)/d_Y(x,z) <= eta(d_E(x,y)/d_E(x,z)) on seeded triples.
QuasisymmetryReport check_quasisymmetry(const GrushinSpace& s, double H, std::size_t triples,
                                        std::uint64_t seed, double resolution = 0.05);

/// One triple; throws PreconditionError unless x, y, z are distinct.
QuasisymmetryReport check_triple(const GrushinSpace& s, double H, const Point& x,
                                 const Point& y, const Point& z, double resolution = 0.05);

/// Greedy cover of the sampled ball B(center, r) by balls of radius r/2 centered at lattice
/// vertices. Membership uses certified sides: a vertex counts as inside B(center, r) unless
/// its lower bound is at least r, and as covered only when its upper bound is below r/2.
std::size_t cover_count(const GrushinSpace& s, const GeodesicGrid& grid, std::size_t center,
                        double r);

/// Runs cover_count for seeded centers and radii on a per_axis^n lattice over the bbox.
/// Grids with per_axis = 8m + 1 are nested and test identical balls.
DoublingReport estimate_doubling(const GrushinSpace& s, std::size_t balls, std::uint64_t seed,
                                 std::size_t per_axis = 33);

/// Gaussian curvature of the conformal metric d_E(.,Y)^(-2 beta) |dx|^2 at p, n = 2, as
/// -Lap(log lambda) / (2 lambda) on a 5-point stencil. h <= 0 selects 1e-3 d_E(p,Y).
/// Throws PreconditionError when the stencil is within 10 h of Y or of the medial axis.
double gaussian_curvature_conformal(const GrushinSpace& s, const Point& p, double h = -1.0);

/// Closed-form curvature where one is known: 0 for beta = 0 and for a single point Y,
/// -beta |u|^(2 beta - 2) for a single line.
std::optional<double> conformal_curvature_closed_form(const GrushinSpace& s, const Point& p);

using MetricCoefficient = std::function<double(double, double)>;

/// Brioschi's formula for E dx^2 + G dy^2 with central differences of step h.
double gaussian_curvature_diagonal(const MetricCoefficient& E, const MetricCoefficient& G,
                                   const Point& p, double h);

/// Samples points off Y and tests |K| <= A d_Y(x,Y)^-2.
CurvatureReport check_whitney_curvature(const GrushinSpace& s, double A, std::size_t samples,
                                        std::uint64_t seed);

NondoublingReport nondoubling_balls(double eps, int n);

/// Count of the packing above; throws ResourceLimit when it exceeds 2^53.
std::uint64_t nondoubling_ball_count(double eps, int n);

/// True when floor(2^(n+1) exp(2^(n eps))) > C^n for some n in [1, n_max].
bool nondoubling_flag(double eps, double C = 10.0, int n_max = 6);

}  // namespace grushin
