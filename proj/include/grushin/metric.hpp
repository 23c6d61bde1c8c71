#pragma once

#include <vector>

#include "grushin/point.hpp"
#include "grushin/singular_set.hpp"

namespace grushin {

/// Axis-aligned box [lo, hi].
struct BoundingBox {
  Point lo;
  Point hi;

  [[nodiscard]] std::size_t dim() const { return lo.dim(); }
  [[nodiscard]] double diameter() const { return dist(lo, hi); }
  [[nodiscard]] bool contains(const Point& p, double slack = 0.0) const;
  [[nodiscard]] BoundingBox expanded(double by) const;
};

/// R^n with the conformal line element ds_E / d_E(., Y)^beta, together with the finite
/// window inside which the discrete solver works.
class GrushinSpace {
 public:
  /// pad < 0 selects the default pad, diameter(bbox).
  GrushinSpace(SingularSet y, double beta, BoundingBox bbox, double pad = -1.0);

  [[nodiscard]] const SingularSet& singular() const { return y_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] const BoundingBox& bbox() const { return bbox_; }
  [[nodiscard]] double pad() const { return pad_; }
  [[nodiscard]] std::size_t dim() const { return y_.dim(); }
  [[nodiscard]] BoundingBox window() const { return bbox_.expanded(pad_); }

  /// The same space dilated by s > 0 about the origin.
  [[nodiscard]] GrushinSpace scaled(double s) const;
  /// The same window and beta with a different singular set.
  [[nodiscard]] GrushinSpace with_singular(SingularSet y) const;

 private:
  SingularSet y_;
  double beta_;
  BoundingBox bbox_;
  double pad_;
};

struct Polyline {
  std::vector<Point> vertices;

  [[nodiscard]] double euclid_length() const;
  /// Drops consecutive duplicate vertices.
  [[nodiscard]] Polyline deduplicated() const;
  [[nodiscard]] Polyline reversed() const;
};

/// d_E(p, Y)^-beta; +inf on Y when beta > 0; 1 when beta = 0.
double weight(const GrushinSpace& s, const Point& p);

/// Grushin length of one straight segment. Returns +inf when the segment runs inside Y
/// over a positive length (beta > 0). Throws NumericalError if quadrature fails.
double segment_length(const GrushinSpace& s, const Point& a, const Point& b);

/// Grushin length of a polyline (sum of segment lengths).
double grushin_length(const GrushinSpace& s, const Polyline& path);

/// ((d + a)^(1-beta) - a^(1-beta)) / (1-beta): the least Grushin length of a path of
/// Euclidean length d starting at distance a from Y. Increasing in d, decreasing in a.
double radial_bound(double d, double a, double beta);

/// Exact d_Y(p, Y) = d_E(p, Y)^(1-beta) / (1-beta).
double distance_to_singular(const GrushinSpace& s, const Point& p);

/// Lower bound on d_Y(x, y) from integrating the weight bound (t + d_E(x,Y))^-beta along
/// any path, symmetrized over the two endpoints. Requires x != y.
double distance_lower_bound(const GrushinSpace& s, const Point& x, const Point& y);

/// Same bound without the precondition; returns 0 when x == y.
double radial_lower_bound(const GrushinSpace& s, const Point& x, const Point& y);

/// d_E(x,y) / (d_E(x,Y) + d_E(x,y))^beta, symmetrized.
double chord_lower_bound(const GrushinSpace& s, const Point& x, const Point& y);

/// Exact d_Y when Y is a single point c: with rho = |p-c|^(1-beta)/(1-beta) the space is a
/// cone of opening (1-beta) over the sphere, so the distance is the chord of the unrolled
/// cone. Returns a negative value when Y is not a single point.
double point_singularity_distance(const GrushinSpace& s, const Point& x, const Point& y);

/// Best available certified lower bound on d_Y(x, y).
double certified_lower_bound(const GrushinSpace& s, const Point& x, const Point& y);

}  // namespace grushin
