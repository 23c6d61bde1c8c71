#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "grushin/metric.hpp"

namespace grushin {

struct SolverOptions {
  /// Smallest cell side. Negative selects 1e-5 * diameter(bbox).
  double floor = -1.0;
  /// Active-cell budget; when exceeded the floor is quadrupled and the grid rebuilt.
  std::size_t max_cells = 60000;
  /// Vertex count the witness is subdivided to during shortening.
  std::size_t max_path_vertices = 64;
};

/// Certified interval [lower, upper] for d_Y(x, y).
struct DistanceBracket {
  Point from;
  Point to;
  double lower = 0.0;
  double upper = 0.0;
  /// Path from `from` to `to` whose Grushin length is `upper`.
  Polyline witness;
  double resolution = 0.0;
  /// Cell floor actually used (may exceed the requested one under the cell budget).
  double floor = 0.0;
  std::size_t cells = 0;
  /// Vertex budget of the shortening step; refine doubles it.
  std::size_t path_vertices = 0;
  /// True when the budget forced a coarser floor than requested.
  bool resource_limited = false;

  [[nodiscard]] double width() const { return upper - lower; }
};

/// Brackets d_Y(x, y): lower from the analytic bounds, upper from a shortest path on an
/// adaptive grid over the padded window, shortened by local moves. Supports n in {2, 3}.
DistanceBracket distance(const GrushinSpace& s, const Point& x, const Point& y,
                         double resolution = 0.02, const SolverOptions& opts = {});

/// Re-solves at half the resolution, half the floor and twice the witness vertex budget,
/// keeping the better upper bound.
DistanceBracket refine(const GrushinSpace& s, const DistanceBracket& b,
                       const SolverOptions& opts = {});

/// Local shortening: string pulling, subdivision and vertex moves normal to the path, each
/// accepted only on a strict decrease of Grushin length. Vertices stay inside `window`.
Polyline shorten_path(const GrushinSpace& s, const Polyline& path, const BoundingBox& window,
                      std::size_t max_vertices = 64);

/// Uniform lattice over a box with 8- (n = 2) or 26-connected (n = 3) edges weighted by
/// exact segment lengths. Graph distances are lengths of actual paths, hence upper bounds
/// on d_Y between lattice vertices, and they form a metric on the vertex set.
class GeodesicGrid {
 public:
  GeodesicGrid(const GrushinSpace& s, const BoundingBox& box, std::vector<std::size_t> counts);
  /// Lattice over s.bbox() with `per_axis` vertices along every axis.
  GeodesicGrid(const GrushinSpace& s, std::size_t per_axis);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const Point& point(std::size_t i) const { return points_[i]; }
  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] std::size_t nearest_vertex(const Point& p) const;
  [[nodiscard]] double spacing(std::size_t axis) const { return step_[axis]; }

  /// Single-source distances; entries beyond `limit` are left at +inf.
  [[nodiscard]] std::vector<double> distances_from(std::size_t source,
                                                   double limit = -1.0) const;
  /// Multi-source distances. When `owner` is given it receives, per vertex, the source
  /// realizing the distance (ties go to the source listed first).
  [[nodiscard]] std::vector<double> distances_from(const std::vector<std::size_t>& sources,
                                                   std::vector<std::size_t>* owner = nullptr,
                                                   double limit = -1.0) const;
  /// Vertices within `radius` of `source`, with their distances, ordered by index.
  [[nodiscard]] std::vector<std::pair<std::size_t, double>> ball(std::size_t source,
                                                                 double radius) const;
  [[nodiscard]] double distance(std::size_t a, std::size_t b) const;
  /// Shortest lattice path between two vertices as a polyline.
  [[nodiscard]] Polyline path(std::size_t a, std::size_t b) const;

 private:
  struct Edge {
    std::uint32_t to;
    double w;
  };
  void build(const GrushinSpace& s);
  std::vector<double> dijkstra(const std::vector<std::size_t>& sources, double limit,
                               std::vector<std::size_t>* owner,
                               std::vector<std::size_t>* prev) const;

  BoundingBox box_;
  std::vector<std::size_t> counts_;
  std::vector<double> step_;
  std::vector<Point> points_;
  std::vector<std::vector<Edge>> adj_;
};

/// CSV with a header row and one vertex per line.
std::string polyline_csv(const Polyline& path);

}  // namespace grushin
