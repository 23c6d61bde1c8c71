#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "grushin/point.hpp"

namespace grushin {

namespace shape {

struct PointShape {
  Point at;
};

struct Segment {
  Point a;
  Point b;
};

/// {origin + s * direction : s >= 0}
struct HalfLine {
  Point origin;
  Point direction;
};

/// {x : normal . (x - point) = 0}; a line when n = 2.
struct Hyperplane {
  Point point;
  Point normal;
};

/// Closed axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;
};

struct Cloud {
  std::vector<Point> points;
};

}  // namespace shape

using Primitive = std::variant<shape::PointShape, shape::Segment, shape::HalfLine,
                               shape::Hyperplane, shape::Box, shape::Cloud>;

/// Where a straight segment meets the singular set.
struct SegmentContact {
  /// Sorted, deduplicated parameters in [0, 1] at which the segment touches Y.
  std::vector<double> hits;
  /// True when a sub-interval of positive Euclidean length lies inside Y.
  bool overlaps = false;
  /// Parameters in (0, 1) of interior closest approaches that come within a small
  /// fraction of the segment length without touching; quadrature splits there.
  std::vector<double> approaches;
};

/// A closed, nonempty singular set Y given as a union of exact primitives.
class SingularSet {
 public:
  SingularSet(std::size_t dim, std::vector<Primitive> primitives);

  static SingularSet point(const Point& p);
  /// The coordinate hyperplane {x_axis = offset}.
  static SingularSet coordinate_plane(std::size_t dim, std::size_t axis, double offset = 0.0);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] const std::vector<Primitive>& primitives() const { return primitives_; }

  /// A copy with `extra` appended to the primitive list.
  [[nodiscard]] SingularSet with(const Primitive& extra) const;

  /// d_E(p, Y), exact.
  [[nodiscard]] double distance(const Point& p) const;

  /// A point of Y realizing d_E(p, Y). Ties go to the earliest primitive, then to the
  /// lexicographically smallest candidate.
  [[nodiscard]] Point nearest(const Point& p) const;

  /// Contact of the segment a->b with Y.
  [[nodiscard]] SegmentContact contact(const Point& a, const Point& b) const;

  /// Distance to the second-nearest convex piece of Y minus distance to the nearest one
  /// (cloud points count as separate pieces); +inf when Y has a single piece. Off Y,
  /// d_E(., Y) is smooth on the ball of radius gap / 2 about p.
  [[nodiscard]] double piece_gap(const Point& p) const;

  /// The single point of Y when Y is exactly one point, used by the cone closed form.
  [[nodiscard]] std::optional<Point> as_single_point() const;

  /// Axis-aligned bounding box of the bounded primitives, if all of Y is bounded.
  [[nodiscard]] std::optional<std::pair<Point, Point>> bounds() const;

  /// Y scaled by s about the origin.
  [[nodiscard]] SingularSet scaled(double s) const;

 private:
  std::size_t dim_;
  std::vector<Primitive> primitives_;
};

double euclid_distance(const Point& p, const SingularSet& y);
Point nearest_point(const Point& p, const SingularSet& y);

std::string primitive_kind(const Primitive& prim);

}  // namespace grushin
