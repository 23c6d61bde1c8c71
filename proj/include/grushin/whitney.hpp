#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "grushin/geodesic.hpp"
#include "grushin/metric.hpp"

namespace grushin {

/// Finite metric sample: indexed points with a distance between any two.
class SampleMetric {
 public:
  virtual ~SampleMetric() = default;
  [[nodiscard]] virtual std::size_t size() const = 0;
  [[nodiscard]] virtual const Point& point(std::size_t i) const = 0;
  [[nodiscard]] virtual double distance(std::size_t i, std::size_t j) const = 0;
  /// Distance from the nearest of `sources` to every sample point; +inf beyond `limit`
  /// (limit < 0: no limit). `owner` receives the realizing source, ties to the earlier one.
  [[nodiscard]] virtual std::vector<double> distances_from(
      const std::vector<std::size_t>& sources, std::vector<std::size_t>* owner = nullptr,
      double limit = -1.0) const = 0;
  /// A positive lower bound on the smallest distance between distinct points.
  [[nodiscard]] virtual double min_separation() const = 0;
  /// Sample points within `radius` of i with their distances, ordered by index.
  [[nodiscard]] virtual std::vector<std::pair<std::size_t, double>> ball(std::size_t i,
                                                                         double radius) const;
};

/// Explicit symmetric distance matrix.
class DenseMetric : public SampleMetric {
 public:
  DenseMetric(std::vector<Point> points, std::vector<double> matrix);
  static DenseMetric euclidean(std::vector<Point> points);
  static DenseMetric from(std::vector<Point> points,
                          const std::function<double(const Point&, const Point&)>& d);

  [[nodiscard]] std::size_t size() const override { return points_.size(); }
  [[nodiscard]] const Point& point(std::size_t i) const override { return points_[i]; }
  [[nodiscard]] double distance(std::size_t i, std::size_t j) const override {
    return d_[i * points_.size() + j];
  }
  [[nodiscard]] std::vector<double> distances_from(const std::vector<std::size_t>& sources,
                                                   std::vector<std::size_t>* owner = nullptr,
                                                   double limit = -1.0) const override;
  [[nodiscard]] double min_separation() const override;

  /// Worst relative triangle excess max (d(i,k) - d(i,j) - d(j,k)) / d(i,k) over triples.
  [[nodiscard]] double triangle_excess() const;

 private:
  std::vector<Point> points_;
  std::vector<double> d_;
};

/// Shortest-path distances on a GeodesicGrid restricted to a subset of its vertices.
class GraphMetric : public SampleMetric {
 public:
  GraphMetric(std::shared_ptr<const GeodesicGrid> grid, std::vector<std::size_t> vertices);
  /// Every vertex of the grid.
  explicit GraphMetric(std::shared_ptr<const GeodesicGrid> grid);

  [[nodiscard]] std::size_t size() const override { return vertices_.size(); }
  [[nodiscard]] const Point& point(std::size_t i) const override {
    return grid_->point(vertices_[i]);
  }
  [[nodiscard]] double distance(std::size_t i, std::size_t j) const override;
  [[nodiscard]] std::vector<double> distances_from(const std::vector<std::size_t>& sources,
                                                   std::vector<std::size_t>* owner = nullptr,
                                                   double limit = -1.0) const override;
  [[nodiscard]] double min_separation() const override { return min_sep_; }
  [[nodiscard]] std::vector<std::pair<std::size_t, double>> ball(std::size_t i,
                                                                 double radius) const override;
  [[nodiscard]] const GeodesicGrid& grid() const { return *grid_; }
  [[nodiscard]] std::size_t vertex(std::size_t i) const { return vertices_[i]; }

 private:
  std::shared_ptr<const GeodesicGrid> grid_;
  std::vector<std::size_t> vertices_;
  std::vector<std::size_t> index_of_;
  double min_sep_ = 0.0;
};

struct ChristData {
  double delta = 1.0 / 8.0;
  double c0 = 1.0 / 9.0;
  double C1 = 2.0;
};

struct WhitneyData {
  double delta = 1.0 / 8.0;
  double c0 = 1.0 / 9.0;
  double C1 = 2.0;
  double a = 4.0;

  [[nodiscard]] ChristData christ() const { return {delta, c0, C1}; }
};

struct ChristCube {
  int k = 0;
  /// Index of the center among the level's net points.
  std::size_t mu = 0;
  /// Sample index of the center x.
  std::size_t center = 0;
  /// Sample indices, sorted.
  std::vector<std::size_t> members;
  std::optional<std::size_t> parent_mu;
  std::vector<std::size_t> children_mu;
};

/// What the built hierarchy satisfies.
struct ChristCheck {
  bool nested = true;
  bool dense = true;
  /// B(x, c0 delta^k) within Q within B(x, C1 delta^k) on every cube, with the requested
  /// constants.
  bool sandwich = true;
  std::size_t sandwich_failures = 0;
  /// Largest c0 and smallest C1 the hierarchy satisfies.
  double c0_tight = 0.0;
  double C1_tight = 0.0;
  /// Net orders tried (1 when the index order already satisfied the sandwich).
  int attempts = 1;
};

/// Nested greedy nets: level k holds a maximal delta^k-separated subset containing the
/// level k-1 net. Levels run from k_min (one net point) to k_fine, where every point is a
/// net point; scales outside that range clamp to it.
class ChristHierarchy {
 public:
  [[nodiscard]] int k_min() const { return k_min_; }
  [[nodiscard]] int k_fine() const { return k_min_ + int(levels_.size()) - 1; }
  [[nodiscard]] const ChristData& data() const { return data_; }
  /// Sample indices the hierarchy decomposes.
  [[nodiscard]] const std::vector<std::size_t>& subset() const { return subset_; }
  /// Net points (sample indices) at scale k, clamped.
  [[nodiscard]] const std::vector<std::size_t>& centers(int k) const;
  /// mu of the level-k cube containing subset position `pos`, clamped.
  [[nodiscard]] std::size_t cube_of(int k, std::size_t pos) const;
  [[nodiscard]] ChristCube cube(int k, std::size_t mu) const;
  /// Every cube at every level k_min..k_fine.
  [[nodiscard]] std::vector<ChristCube> cubes() const;
  [[nodiscard]] const ChristCheck& check() const { return check_; }

 private:
  friend ChristHierarchy christ_decompose(const SampleMetric&, const ChristData&,
                                          std::vector<std::size_t>);
  struct Level {
    std::vector<std::size_t> centers;
    /// Per subset position, index into centers.
    std::vector<std::size_t> owner;
    /// Per center, index into the previous level's centers.
    std::vector<std::size_t> parent;
  };
  [[nodiscard]] const Level& level(int k) const;
  ChristData data_;
  std::vector<std::size_t> subset_;
  int k_min_ = 0;
  std::vector<Level> levels_;
  ChristCheck check_;
};

/// Throws PreconditionError unless 0 < delta + c0 < 1/4, delta, c0 > 0 and
/// C1 > 1/(1 - delta).
void require_christ_data(const ChristData& d);

/// Builds and verifies the hierarchy on `subset` (all points when empty). When the
/// sandwich fails in index order, reversed and seeded net orders are retried; the best
/// attempt is kept and its tightest constants reported.
ChristHierarchy christ_decompose(const SampleMetric& m, const ChristData& data,
                                 std::vector<std::size_t> subset = {});

struct WhitneyCube {
  int k = 0;
  std::size_t center = 0;
  std::vector<std::size_t> members;
  double diam = 0.0;
  /// d(Q, X \ Omega).
  double boundary_distance = 0.0;
  bool in_shell = false;
  /// Synthetic point attached by enlarge_cubes.
  bool enlarged = false;
  /// d(q, x) for the synthetic point (0 when not enlarged).
  double q_offset = 0.0;
  /// Diameter of the enlarged cube (equals diam when not enlarged).
  double diam_enlarged = 0.0;
};

struct CubeSystem {
  WhitneyData data;
  std::vector<WhitneyCube> cubes;
  std::vector<std::size_t> omega;
  std::vector<std::size_t> complement;
  /// Per sample index: d(p, X \ Omega).
  std::vector<double> boundary;
  /// Per sample index: position of the cube containing it, or npos.
  std::vector<std::size_t> cube_of;
  bool disjoint = false;
  bool in_shell = false;
  /// Every Omega point within C1 delta^k_min of a cube.
  bool dense = false;
  ChristCheck christ;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Shells Omega_k = {a C1 delta^k < d(x, X\Omega) <= a C1 delta^(k-1)}, the level-k cubes
/// meeting Omega_k, and the maximal ones among them. `boundary`, when given, holds
/// d(p, X \ Omega) per sample index; otherwise it is measured to the complement samples.
CubeSystem whitney_decompose(const SampleMetric& m, const std::vector<std::size_t>& omega,
                             const WhitneyData& data,
                             std::optional<std::vector<double>> boundary = std::nullopt);

/// Attaches the synthetic point q with d(q, x) = c0 delta^k / 4 and d(q, p) = d(x, p) +
/// c0 delta^k / 4 to every cube of diameter below c0 delta^k / 4.
CubeSystem enlarge_cubes(const SampleMetric& m, CubeSystem sys);

/// d(Q, R) over the cube members; synthetic points never shorten it.
double cube_distance(const SampleMetric& m, const CubeSystem& sys, std::size_t q,
                     std::size_t r);

/// d(Q, R) / min(diam Q, diam R) with enlarged diameters; 0 for Q = R. Throws
/// PreconditionError on a zero diameter.
double relative_distance(const SampleMetric& m, const CubeSystem& sys, std::size_t q,
                         std::size_t r);

struct WhitneyBall {
  /// Q*, sorted cube positions.
  std::vector<std::size_t> star;
  /// Q**.
  std::vector<std::size_t> star2;
};

/// Whitney balls of every cube. With `enlarged` false the original diameters are used,
/// and a zero-diameter cube's ball is itself.
std::vector<std::vector<std::size_t>> whitney_stars(const SampleMetric& m,
                                                    const CubeSystem& sys, double eps,
                                                    bool enlarged = true);

WhitneyBall whitney_ball(const SampleMetric& m, const CubeSystem& sys, std::size_t q,
                         double eps = 0.5);

struct BallOverlapReport {
  double eps = 0.5;
  std::size_t cubes = 0;
  std::size_t pairs_checked = 0;
  /// Pairs R in Q* breaking the diameter comparison.
  std::size_t diameter_violations = 0;
  /// Cubes with diam <= c0 delta^k / 2 whose Q* or Q** is not {Q}.
  std::size_t isolation_failures = 0;
  std::size_t small_cubes = 0;
  /// Cubes where R in Q* and R~ in Q~* disagree.
  std::size_t correspondence_failures = 0;
  std::size_t asymmetric_pairs = 0;
  std::size_t max_star = 0;
  std::size_t max_star2 = 0;
  /// Max over sample points of the number of cubes Q with the point in the union of Q**.
  std::size_t max_membership = 0;
};

BallOverlapReport verify_whitney_balls(const SampleMetric& m, const CubeSystem& sys,
                                       double eps = 0.5);

/// Constants of the per-cube chart f_B(y) = ell^-beta y.
struct ChartConstants {
  double a = 0.0;
  double C2 = 0.0;
  double J = 0.0;
  double C3 = 0.0;
  [[nodiscard]] double lower_factor(double beta) const;
  [[nodiscard]] double upper_factor(double beta) const;
};

ChartConstants chart_constants(double a, double beta, double delta = 1.0 / 8.0);

/// Smallest integer a >= 4 with C3 - J > 0; throws PreconditionError past 10^6.
double admissible_a(double beta, double delta = 1.0 / 8.0);

struct ChartReport {
  std::size_t cube = 0;
  int k = 0;
  double M = 0.0;
  double L = 0.0;
  double ell = 0.0;
  ChartConstants constants;
  double a_beta = 0.0;
  std::size_t pairs = 0;
  /// Pairs where the certified brackets prove the sandwich.
  std::size_t certified = 0;
  /// Pairs where the brackets prove a side fails.
  std::size_t violations = 0;
  /// Smallest and largest ell^beta d_Y / d_E over pairs (from bracket midpoints).
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  /// ratio_max / ratio_min; 1 when the cube has fewer than two points.
  double distortion = 1.0;
};

/// Checks (1+2J)^-beta d_E <= ell^beta d_Y <= (C3-J)^-beta d_E on pairs of cube members,
/// with d_Y bracketed below by the analytic bound and above by the straight segment.
/// Cubes with more than `max_pairs` pairs are checked on an evenly strided subset.
ChartReport cube_chart(const GrushinSpace& s, const SampleMetric& m, const CubeSystem& sys,
                       std::size_t cube, std::size_t max_pairs = 4000);

}  // namespace grushin
