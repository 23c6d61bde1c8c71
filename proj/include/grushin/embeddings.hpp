#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "grushin/metric.hpp"
#include "grushin/whitney.hpp"

namespace grushin {

/// (r^(1-beta) cos t, r^(1-beta) sin t, r^(1-beta) sqrt((1-beta)^-2 - 1)) in polar
/// coordinates; the origin maps to 0.
Point cone_map(double beta, const Point& p);

/// (|x|^alpha x / (1+alpha), y).
Point grushin_chart(double alpha, const Point& p);
Point grushin_chart_inverse(double alpha, const Point& q);

/// (1+alpha)^(-alpha/(1+alpha)) |u|^(-alpha/(1+alpha)): the image line-element coefficient.
double pushforward_weight(double alpha, const Point& q);

struct SnowflakeParameters {
  double beta_tilde = 0.0;
  double alpha_tilde = 0.0;
  int target_dim = 2;
};

/// beta~ = 1 - eps, alpha~ = (beta~ + beta - beta~ beta) / (1 - beta~ - beta + beta~ beta),
/// target dimension floor(alpha~) + 2.
SnowflakeParameters snowflake_parameter(double beta, double eps);

/// A named map or a composition of named maps, applied left to right.
class CandidateMap {
 public:
  struct Stage {
    /// identity, cone, grushin-chart, grushin-chart-inverse, project-xy
    std::string name;
    double param = 0.0;
  };

  /// Throws PreconditionError on an unknown name or a bad parameter.
  static CandidateMap named(const std::string& name, double param = 0.0, std::size_t dim = 2);
  CandidateMap then(const CandidateMap& next) const;

  [[nodiscard]] std::size_t domain_dim() const { return domain_dim_; }
  [[nodiscard]] std::size_t target_dim() const { return target_dim_; }
  [[nodiscard]] const std::vector<Stage>& stages() const { return stages_; }
  /// "cone(0.5) | project-xy"
  [[nodiscard]] std::string describe() const;
  Point operator()(const Point& p) const;

 private:
  std::vector<Stage> stages_;
  std::size_t domain_dim_ = 2;
  std::size_t target_dim_ = 2;
};

struct DistortionPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double d_lower = 0.0;
  double d_upper = 0.0;
  double d_target = 0.0;
};

struct DistortionReport {
  /// sqrt(max ratio / min ratio) over witnessed pairs, with ratios d_target / d taken on the
  /// side of the bracket that makes the bound certified; at least 1.
  double L_lower = 1.0;
  /// The same with bracket midpoints.
  double L_estimate = 1.0;
  /// Global scale lambda minimizing the max ratio distortion of lambda f.
  double scale = 1.0;
  std::size_t pairs = 0;
  /// Pair with the largest d_target / d_upper.
  DistortionPair worst_expand;
  /// Pair with the smallest d_target / d_lower.
  DistortionPair worst_contract;
};

/// Evenly spread points of the annulus r0 <= |p - c| <= r1 (area-uniform radii).
std::vector<Point> annulus_sample(std::size_t n, double r0, double r1, std::uint64_t seed,
                                  const Point& center = Point{0.0, 0.0});

/// Brackets from the analytic lower bound and the straight segment (exact when Y is a
/// point); `pairs` seeded index pairs of `points`. The first k pairs do not depend on
/// `pairs`, so L_lower is non-decreasing in it.
DistortionReport measure_distortion(const GrushinSpace& s, const std::vector<Point>& points,
                                    const CandidateMap& f, std::size_t pairs, std::uint64_t seed);

/// Exact sample distances.
DistortionReport measure_distortion(const SampleMetric& m, const CandidateMap& f,
                                    std::size_t pairs, std::uint64_t seed);

struct LengthCheck {
  std::size_t paths = 0;
  /// max |L_image - L_source| / L_source.
  double max_rel_error = 0.0;
  std::vector<double> source_lengths;
  std::vector<double> image_lengths;
};

/// Random polylines in the annulus 1/2 <= r <= 2 (segments keep off the origin): Grushin
/// length with Y = {0} against the Euclidean length of the cone image, the latter
/// integrated from the map's Jacobian.
LengthCheck cone_length_check(double beta, std::size_t paths, std::uint64_t seed);

/// Random polylines in x in [1/4, 2]: length in dx^2 + |x|^(-2 alpha) dy^2 against the
/// pushforward-weighted Euclidean length of the image curve.
LengthCheck chart_length_check(double alpha, std::size_t paths, std::uint64_t seed);

}  // namespace grushin
