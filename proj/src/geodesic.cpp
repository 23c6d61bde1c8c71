#include "grushin/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace grushin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxLevel = 20;
constexpr double kStrict = 1e-12;

using Lattice = std::array<std::int64_t, 3>;

std::uint64_t pack(const Lattice& q) {
  return (std::uint64_t(q[0]) << 42) | (std::uint64_t(q[1]) << 21) | std::uint64_t(q[2]);
}

// Three-point Gauss-Legendre estimate of a segment's Grushin length. Only used to steer
// the graph search; reported lengths always come from segment_length.
double approx_length(const GrushinSpace& s, const Point& a, const Point& b) {
  const double len = dist(a, b);
  if (s.beta() == 0.0 || len == 0.0) return len;
  static constexpr std::array<double, 3> node{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> wt{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const Point mid = lerp(a, b, 0.5);
  const Point half = (b - a) * 0.5;
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = s.singular().distance(mid + half * node[i]);
    if (d == 0.0) return kInf;
    acc += wt[i] * std::pow(d, -s.beta());
  }
  return 0.5 * len * acc;
}

double safe_segment(const GrushinSpace& s, const Point& a, const Point& b) {
  try {
    return segment_length(s, a, b);
  } catch (const NumericalError&) {
    return kInf;
  }
}

// Lazy Dijkstra over an adjacency list; ties broken by (distance, vertex index).
template <class Adj>
std::vector<double> shortest(const Adj& adj, std::size_t src, std::size_t target,
                             std::vector<std::size_t>& prev) {
  const std::size_t n = adj.size();
  std::vector<double> d(n, kInf);
  prev.assign(n, n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[src] = 0.0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > d[u]) continue;
    if (u == target) break;
    for (const auto& [v, w] : adj[u]) {
      const double nd = du + w;
      if (nd < d[v]) {
        d[v] = nd;
        prev[v] = u;
        pq.emplace(nd, v);
      }
    }
  }
  return d;
}

class AdaptiveGrid {
 public:
  struct Cell {
    Lattice origin{};
    int level = 0;
    int first_child = -1;
    bool active = true;
  };

  AdaptiveGrid(const GrushinSpace& s, const Point& x, const Point& y, double resolution,
               double floor, std::size_t budget)
      : s_(s), x_(x), y_(y), n_(s.dim()), res_(resolution), floor_(floor), budget_(budget) {
    window_ = s.window();
    side_ = 0.0;
    for (std::size_t i = 0; i < n_; ++i) side_ = std::max(side_, window_.hi[i] - window_.lo[i]);
    lo_ = Point(n_);
    for (std::size_t i = 0; i < n_; ++i)
      lo_[i] = 0.5 * (window_.lo[i] + window_.hi[i]) - 0.5 * side_;
    unit_ = side_ / double(std::int64_t(1) << kMaxLevel);
    const auto& Y = s.singular();
    dx_ = Y.distance(x);
    dy_ = Y.distance(y);
    rho_x_ = rho(dx_);
    rho_y_ = rho(dy_);
    bound_ = safe_segment(s, x, y);
    sep_ = dist(x, y);
  }

  // Returns false when the active-cell budget is exceeded.
  bool build() {
    cells_.clear();
    cells_.push_back(Cell{});
    classify(0);
    std::ptrdiff_t active = cells_[0].active ? 1 : 0;
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      if (!wants_split(c)) continue;
      active += split(c);
      if (std::size_t(active) > budget_) return false;
      for (int k = (1 << n_) - 1; k >= 0; --k) stack.push_back(cells_[c].first_child + k);
    }
    if (!balance(active)) return false;
    active_ = std::size_t(active);
    return true;
  }

  [[nodiscard]] std::size_t active_cells() const { return active_; }

  // Shortest graph path from x to y, or an empty polyline when unreachable.
  Polyline shortest_path() const {
    std::unordered_map<std::uint64_t, std::size_t> index;
    std::vector<Point> verts;
    std::vector<int> leaves;
    for (std::size_t c = 0; c < cells_.size(); ++c)
      if (cells_[c].first_child < 0 && cells_[c].active) leaves.push_back(int(c));
    auto vertex_of = [&](const Lattice& q) {
      const auto key = pack(q);
      auto it = index.find(key);
      if (it != index.end()) return it->second;
      index.emplace(key, verts.size());
      verts.push_back(lattice_point(q));
      return verts.size() - 1;
    };
    for (int c : leaves) {
      const auto& cell = cells_[c];
      const std::int64_t u = units(cell.level);
      for (int corner = 0; corner < (1 << n_); ++corner) {
        Lattice q = cell.origin;
        for (std::size_t i = 0; i < n_; ++i)
          if (corner >> i & 1) q[i] += u;
        vertex_of(q);
      }
    }
    using Adj = std::vector<std::vector<std::pair<std::size_t, double>>>;
    Adj adj(verts.size() + 2);
    const std::size_t xi = verts.size();
    const std::size_t yi = verts.size() + 1;
    verts.push_back(x_);
    verts.push_back(y_);
    auto connect = [&](std::size_t a, std::size_t b) {
      const double w = approx_length(s_, verts[a], verts[b]);
      if (!std::isfinite(w)) return;
      adj[a].emplace_back(b, w);
      adj[b].emplace_back(a, w);
    };
    const int x_leaf = locate(to_lattice(x_));
    const int y_leaf = locate(to_lattice(y_));
    std::vector<std::size_t> bnd;
    for (int c : leaves) {
      boundary_vertices(c, index, bnd);
      for (std::size_t i = 0; i < bnd.size(); ++i)
        for (std::size_t j = i + 1; j < bnd.size(); ++j) connect(bnd[i], bnd[j]);
      if (c == x_leaf)
        for (auto v : bnd) connect(xi, v);
      if (c == y_leaf)
        for (auto v : bnd) connect(yi, v);
    }
    if (x_leaf == y_leaf) connect(xi, yi);
    std::vector<std::size_t> prev;
    const auto d = shortest(adj, xi, yi, prev);
    if (!std::isfinite(d[yi])) return {};
    std::vector<Point> out;
    for (std::size_t v = yi; v != xi; v = prev[v]) out.push_back(verts[v]);
    out.push_back(verts[xi]);
    std::reverse(out.begin(), out.end());
    return Polyline{std::move(out)}.deduplicated();
  }

 private:
  [[nodiscard]] double rho(double d) const {
    const double one_m = 1.0 - s_.beta();
    return std::pow(d, one_m) / one_m;
  }
  static std::int64_t units(int level) { return std::int64_t(1) << (kMaxLevel - level); }
  [[nodiscard]] double cell_side(int level) const { return side_ / double(std::int64_t(1) << level); }

  [[nodiscard]] Point lattice_point(const Lattice& q) const {
    Point p = lo_;
    for (std::size_t i = 0; i < n_; ++i) p[i] += unit_ * double(q[i]);
    return p;
  }

  [[nodiscard]] Lattice to_lattice(const Point& p) const {
    Lattice q{0, 0, 0};
    const std::int64_t top = (std::int64_t(1) << kMaxLevel) - 1;
    for (std::size_t i = 0; i < n_; ++i)
      q[i] = std::clamp(std::int64_t(std::floor((p[i] - lo_[i]) / unit_)), std::int64_t(0), top);
    return q;
  }

  // Leaf containing lattice point q (points on a shared face go to the upper cell).
  [[nodiscard]] int locate(const Lattice& q) const {
    int c = 0;
    while (cells_[c].first_child >= 0) {
      const auto& cell = cells_[c];
      const std::int64_t half = units(cell.level) / 2;
      int k = 0;
      for (std::size_t i = 0; i < n_; ++i)
        if (q[i] >= cell.origin[i] + half) k |= 1 << i;
      c = cell.first_child + k;
    }
    return c;
  }

  // Lower bound on d_Y(p, z) over z in the cell, for p at distance dp from Y.
  [[nodiscard]] double cell_bound(double dp, double rp, double m, double dlow,
                                  double dhigh) const {
    const double beta = s_.beta();
    double lb = std::max(radial_bound(m, dp, beta), radial_bound(m, dhigh, beta));
    lb = std::max({lb, rp - rho(dhigh), rho(dlow) - rp});
    return lb;
  }

  void classify(int c) {
    auto& cell = cells_[c];
    const double h = cell_side(cell.level);
    const Point lo = lattice_point(cell.origin);
    bool inside = true;
    bool outside = false;
    for (std::size_t i = 0; i < n_; ++i) {
      const double a = lo[i];
      const double b = lo[i] + h;
      if (a < window_.lo[i] - 1e-12 * side_ || b > window_.hi[i] + 1e-12 * side_) inside = false;
      if (b <= window_.lo[i] || a >= window_.hi[i]) outside = true;
    }
    straddles_.resize(cells_.size(), false);
    straddles_[c] = !inside && !outside;
    if (outside || (!inside && h <= s_.pad() / 8.0)) {
      cell.active = false;
      return;
    }
    if (!std::isfinite(bound_) || s_.beta() == 0.0) {
      cell.active = true;
      return;
    }
    geometry(c, dlow_tmp_, dhigh_tmp_);
    const double mx = box_distance(c, x_);
    const double my = box_distance(c, y_);
    const double lb = cell_bound(dx_, rho_x_, mx, dlow_tmp_, dhigh_tmp_) +
                      cell_bound(dy_, rho_y_, my, dlow_tmp_, dhigh_tmp_);
    cell.active = lb <= bound_ * (1.0 + 1e-9) + 1e-12;
  }

  void geometry(int c, double& dlow, double& dhigh) const {
    const auto& cell = cells_[c];
    const double h = cell_side(cell.level);
    Point center = lattice_point(cell.origin);
    for (std::size_t i = 0; i < n_; ++i) center[i] += 0.5 * h;
    const double half_diag = 0.5 * h * std::sqrt(double(n_));
    const double dc = s_.singular().distance(center);
    dlow = std::max(0.0, dc - half_diag);
    dhigh = dc + half_diag;
  }

  [[nodiscard]] double box_distance(int c, const Point& p) const {
    const auto& cell = cells_[c];
    const double h = cell_side(cell.level);
    const Point lo = lattice_point(cell.origin);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double d = std::max({lo[i] - p[i], 0.0, p[i] - (lo[i] + h)});
      acc += d * d;
    }
    return std::sqrt(acc);
  }

  [[nodiscard]] bool wants_split(int c) const {
    const auto& cell = cells_[c];
    if (cell.level >= kMaxLevel - 1) return false;
    const double h = cell_side(cell.level);
    if (straddles_[c]) return cell.active;
    if (!cell.active) return false;
    if (h > 0.5 * sep_ && h > floor_ &&
        std::min(box_distance(c, x_), box_distance(c, y_)) <= sep_)
      return true;
    double dlow = 0.0, dhigh = 0.0;
    geometry(c, dlow, dhigh);
    return h > std::max(res_ * dlow, floor_);
  }

  // Splits a leaf; returns the change in the number of active leaves.
  std::ptrdiff_t split(int c) {
    const int first = int(cells_.size());
    const bool was_active = cells_[c].active;
    const int level = cells_[c].level + 1;
    const Lattice origin = cells_[c].origin;
    const std::int64_t u = units(level);
    std::ptrdiff_t added = 0;
    for (int k = 0; k < (1 << n_); ++k) {
      Cell child;
      child.level = level;
      child.origin = origin;
      for (std::size_t i = 0; i < n_; ++i)
        if (k >> i & 1) child.origin[i] += u;
      cells_.push_back(child);
      classify(int(cells_.size()) - 1);
      if (cells_.back().active) ++added;
    }
    cells_[c].first_child = first;
    return added - (was_active ? 1 : 0);
  }

  // 2:1 balance among active leaves so each leaf sees at most one hanging vertex per face.
  bool balance(std::ptrdiff_t& active) {
    const std::int64_t extent = std::int64_t(1) << kMaxLevel;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t c = 0; c < cells_.size(); ++c) {
        if (cells_[c].first_child >= 0 || !cells_[c].active) continue;
        const int level = cells_[c].level;
        const std::int64_t u = units(level);
        int combos = 1;
        for (std::size_t i = 0; i < n_; ++i) combos *= 3;
        for (int m = 0; m < combos; ++m) {
          Lattice q = cells_[c].origin;
          int code = m;
          bool self = true;
          bool valid = true;
          for (std::size_t i = 0; i < n_; ++i) {
            const int o = code % 3 - 1;
            code /= 3;
            if (o != 0) self = false;
            q[i] += o < 0 ? -1 : (o > 0 ? u : u / 2);
            if (q[i] < 0 || q[i] >= extent) valid = false;
          }
          if (self || !valid) continue;
          const int nb = locate(q);
          if (cells_[nb].level < level - 1 && cells_[nb].active) {
            active += split(nb);
            if (std::size_t(active) > budget_) return false;
            changed = true;
          }
        }
      }
    }
    return true;
  }

  void boundary_vertices(int c, const std::unordered_map<std::uint64_t, std::size_t>& index,
                         std::vector<std::size_t>& out) const {
    out.clear();
    const auto& cell = cells_[c];
    const std::int64_t half = units(cell.level) / 2;
    int combos = 1;
    for (std::size_t i = 0; i < n_; ++i) combos *= 3;
    for (int m = 0; m < combos; ++m) {
      Lattice q = cell.origin;
      int code = m;
      bool center = true;
      for (std::size_t i = 0; i < n_; ++i) {
        const int o = code % 3;
        code /= 3;
        if (o != 1) center = false;
        q[i] += o * half;
      }
      if (center) continue;
      auto it = index.find(pack(q));
      if (it != index.end()) out.push_back(it->second);
    }
  }

  const GrushinSpace& s_;
  Point x_, y_;
  std::size_t n_;
  double res_, floor_;
  std::size_t budget_;
  BoundingBox window_;
  Point lo_;
  double side_ = 0.0, unit_ = 0.0;
  double dx_ = 0.0, dy_ = 0.0, rho_x_ = 0.0, rho_y_ = 0.0;
  double bound_ = kInf, sep_ = 0.0;
  double dlow_tmp_ = 0.0, dhigh_tmp_ = 0.0;
  std::vector<Cell> cells_;
  std::vector<bool> straddles_;
  std::size_t active_ = 0;
};

Point clamp_to(const BoundingBox& box, Point p) {
  for (std::size_t i = 0; i < p.dim(); ++i) p[i] = std::clamp(p[i], box.lo[i], box.hi[i]);
  return p;
}

// Unit directions normal to t (t nonzero), completed from coordinate axes.
std::vector<Point> normals(const Point& t) {
  const std::size_t n = t.dim();
  std::vector<Point> basis{t * (1.0 / norm(t))};
  for (std::size_t i = 0; i < n && basis.size() < n; ++i) {
    Point e(n);
    e[i] = 1.0;
    for (const auto& b : basis) e -= b * dot(e, b);
    const double len = norm(e);
    if (len > 1e-6) basis.push_back(e * (1.0 / len));
  }
  return {basis.begin() + 1, basis.end()};
}

std::vector<Point> pull_strings(const GrushinSpace& s, const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<double> lens(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) lens[i] = safe_segment(s, pts[i], pts[i + 1]);
  std::vector<Point> out{pts[0]};
  std::size_t i = 0;
  while (i + 1 < n) {
    std::size_t best = i + 1;
    double acc = lens[i];
    int misses = 0;
    for (std::size_t k = i + 2; k < n && misses < 3; ++k) {
      acc += lens[k - 1];
      const double direct = safe_segment(s, pts[i], pts[k]);
      if (direct < acc - kStrict) {
        best = k;
        misses = 0;
      } else {
        ++misses;
      }
    }
    out.push_back(pts[best]);
    i = best;
  }
  return out;
}

// One pass of normal-direction pattern search over interior vertices; returns the number
// of accepted moves.
std::size_t sweep(const GrushinSpace& s, std::vector<Point>& pts, const BoundingBox& window) {
  std::size_t moves = 0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Point& prev = pts[i - 1];
    const Point& next = pts[i + 1];
    Point p = pts[i];
    const Point chord = next - prev;
    if (norm(chord) == 0.0) continue;
    const auto dirs = normals(chord);
    double f0 = safe_segment(s, prev, p) + safe_segment(s, p, next);
    const double local = dist(prev, p) + dist(p, next);
    double h = 0.25 * local;
    for (int iter = 0; iter < 80 && h > 1e-7 * local; ++iter) {
      bool improved = false;
      for (const auto& dir : dirs) {
        for (double sign : {1.0, -1.0}) {
          const Point q = clamp_to(window, p + dir * (sign * h));
          const double f = safe_segment(s, prev, q) + safe_segment(s, q, next);
          if (f < f0 - kStrict) {
            p = q;
            f0 = f;
            improved = true;
            break;
          }
        }
        if (improved) break;
      }
      if (improved) {
        ++moves;
      } else {
        h *= 0.5;
      }
    }
    pts[i] = p;
  }
  return moves;
}

// `count` points evenly spaced in Euclidean arc length along the polyline.
std::vector<Point> resample(const std::vector<Point>& pts, std::size_t count) {
  if (pts.size() <= count) return pts;
  std::vector<double> acc{0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) acc.push_back(acc.back() + dist(pts[i - 1], pts[i]));
  std::vector<Point> out{pts.front()};
  std::size_t seg = 1;
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const double target = acc.back() * double(k) / double(count - 1);
    while (seg + 1 < pts.size() && acc[seg] < target) ++seg;
    const double span = acc[seg] - acc[seg - 1];
    const double t = span > 0.0 ? (target - acc[seg - 1]) / span : 0.0;
    out.push_back(lerp(pts[seg - 1], pts[seg], t));
  }
  out.push_back(pts.back());
  return out;
}

double total_length(const GrushinSpace& s, const std::vector<Point>& pts) {
  double t = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) t += safe_segment(s, pts[i - 1], pts[i]);
  return t;
}

}  // namespace

Polyline shorten_path(const GrushinSpace& s, const Polyline& path, const BoundingBox& window,
                      std::size_t max_vertices) {
  std::vector<Point> pulled = path.deduplicated().vertices;
  if (pulled.size() < 2) return Polyline{pulled};
  pulled = pull_strings(s, pulled);
  // Vertex moves relax long chains slowly, so optimize from a coarse resampling upward and
  // keep whichever of the two paths is shorter.
  std::vector<Point> pts = resample(pulled, 5);
  double current = total_length(s, pts);
  int stalls = 0;
  while (true) {
    for (int pass = 0; pass < 20; ++pass)
      if (sweep(s, pts, window) == 0) break;
    const double after = total_length(s, pts);
    stalls = after < current * (1.0 - 1e-9) ? 0 : stalls + 1;
    current = after;
    if (pts.size() >= max_vertices || stalls >= 2) break;
    std::vector<Point> finer{pts[0]};
    for (std::size_t i = 1; i < pts.size(); ++i) {
      finer.push_back(lerp(pts[i - 1], pts[i], 0.5));
      finer.push_back(pts[i]);
    }
    pts = std::move(finer);
  }
  pts = pull_strings(s, pts);
  if (total_length(s, pulled) < total_length(s, pts)) pts = std::move(pulled);
  return Polyline{pts}.deduplicated();
}

DistanceBracket distance(const GrushinSpace& s, const Point& x, const Point& y,
                         double resolution, const SolverOptions& opts) {
  require_same_dim(x, y);
  if (x.dim() != s.dim()) throw DimensionError("point dimension does not match space");
  if (s.dim() != 2 && s.dim() != 3)
    throw UnsupportedDimension("the grid solver supports n = 2 and n = 3 only");
  if (!(resolution > 0.0)) throw PreconditionError("resolution must be positive");
  if (!s.bbox().contains(x, 1e-12) || !s.bbox().contains(y, 1e-12))
    throw PreconditionError("endpoints must lie in the bounding box");

  // Canonical orientation makes the result exactly symmetric in (x, y).
  const bool swapped = lex_less(y, x);
  const Point& a = swapped ? y : x;
  const Point& b = swapped ? x : y;

  DistanceBracket out;
  out.from = x;
  out.to = y;
  out.resolution = resolution;
  out.path_vertices = opts.max_path_vertices;
  out.lower = x == y ? 0.0 : certified_lower_bound(s, a, b);
  if (x == y) {
    out.witness = Polyline{{x, y}};
    return out;
  }

  double floor = opts.floor > 0.0 ? opts.floor : 1e-5 * s.bbox().diameter();
  out.floor = floor;
  if (s.beta() == 0.0) {
    // Flat metric: the segment is the geodesic.
    out.upper = dist(x, y);
    out.lower = out.upper;
    out.witness = Polyline{{x, y}};
    return out;
  }
  Polyline graph_path;
  for (int attempt = 0; attempt < 40; ++attempt) {
    AdaptiveGrid grid(s, a, b, resolution, floor, opts.max_cells);
    if (grid.build()) {
      out.cells = grid.active_cells();
      graph_path = grid.shortest_path();
      break;
    }
    floor *= 4.0;
    out.resource_limited = true;
  }
  out.floor = floor;

  Polyline best{{a, b}};
  double best_len = segment_length(s, a, b);
  if (graph_path.vertices.size() >= 2) {
    Polyline shortened = shorten_path(s, graph_path, s.window(), opts.max_path_vertices);
    const double len = grushin_length(s, shortened);
    if (len < best_len) {
      best_len = len;
      best = std::move(shortened);
    }
  }
  out.upper = best_len;
  out.witness = swapped ? best.reversed() : best;
  return out;
}

DistanceBracket refine(const GrushinSpace& s, const DistanceBracket& b,
                       const SolverOptions& opts) {
  SolverOptions finer = opts;
  finer.floor = 0.5 * (b.floor > 0.0 ? b.floor : 1e-5 * s.bbox().diameter());
  finer.max_path_vertices = 2 * std::max(b.path_vertices, opts.max_path_vertices);
  DistanceBracket next = distance(s, b.from, b.to, 0.5 * b.resolution, finer);
  next.lower = std::max(next.lower, b.lower);
  if (b.upper < next.upper) {
    next.upper = b.upper;
    next.witness = b.witness;
  }
  return next;
}

GeodesicGrid::GeodesicGrid(const GrushinSpace& s, const BoundingBox& box,
                           std::vector<std::size_t> counts)
    : box_(box), counts_(std::move(counts)) {
  if (box_.dim() != s.dim()) throw DimensionError("grid box dimension does not match space");
  if (s.dim() != 2 && s.dim() != 3)
    throw UnsupportedDimension("the grid solver supports n = 2 and n = 3 only");
  if (counts_.size() != s.dim()) throw DimensionError("one vertex count per axis is required");
  for (auto c : counts_)
    if (c < 2) throw PreconditionError("at least two vertices per axis are required");
  build(s);
}

GeodesicGrid::GeodesicGrid(const GrushinSpace& s, std::size_t per_axis)
    : GeodesicGrid(s, s.bbox(), std::vector<std::size_t>(s.dim(), per_axis)) {}

void GeodesicGrid::build(const GrushinSpace& s) {
  const std::size_t n = s.dim();
  step_.resize(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    step_[i] = (box_.hi[i] - box_.lo[i]) / double(counts_[i] - 1);
    total *= counts_[i];
  }
  points_.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  auto linear = [&](const std::vector<std::size_t>& q) {
    std::size_t v = 0;
    for (std::size_t i = n; i-- > 0;) v = v * counts_[i] + q[i];
    return v;
  };
  for (std::size_t v = 0; v < total; ++v) {
    std::size_t rem = v;
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) {
      idx[i] = rem % counts_[i];
      rem /= counts_[i];
      p[i] = idx[i] + 1 == counts_[i] ? box_.hi[i] : box_.lo[i] + step_[i] * double(idx[i]);
    }
    points_.push_back(p);
  }
  adj_.assign(total, {});
  int combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 3;
  std::vector<std::size_t> q(n);
  for (std::size_t v = 0; v < total; ++v) {
    std::size_t rem = v;
    for (std::size_t i = 0; i < n; ++i) {
      idx[i] = rem % counts_[i];
      rem /= counts_[i];
    }
    for (int m = 0; m < combos; ++m) {
      int code = m;
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        const int o = code % 3 - 1;
        code /= 3;
        const auto c = std::int64_t(idx[i]) + o;
        if (c < 0 || c >= std::int64_t(counts_[i])) ok = false;
        q[i] = std::size_t(std::max<std::int64_t>(c, 0));
      }
      if (!ok) continue;
      const std::size_t u = linear(q);
      if (u <= v) continue;  // each undirected edge once
      const double w = segment_length(s, points_[v], points_[u]);
      if (!std::isfinite(w)) continue;
      adj_[v].push_back({std::uint32_t(u), w});
      adj_[u].push_back({std::uint32_t(v), w});
    }
  }
}

std::size_t GeodesicGrid::nearest_vertex(const Point& p) const {
  require_same_dim(p, box_.lo);
  std::size_t v = 0;
  for (std::size_t i = counts_.size(); i-- > 0;) {
    const double t = std::round((p[i] - box_.lo[i]) / step_[i]);
    const auto c = std::size_t(std::clamp(t, 0.0, double(counts_[i] - 1)));
    v = v * counts_[i] + c;
  }
  return v;
}

std::vector<double> GeodesicGrid::dijkstra(const std::vector<std::size_t>& sources, double limit,
                                           std::vector<std::size_t>* owner,
                                           std::vector<std::size_t>* prev) const {
  const std::size_t n = points_.size();
  std::vector<double> d(n, kInf);
  std::vector<std::size_t> rank(n, n);
  if (prev) prev->assign(n, n);
  using Item = std::tuple<double, std::size_t, std::size_t>;  // (distance, source rank, vertex)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (std::size_t r = 0; r < sources.size(); ++r) {
    const auto v = sources[r];
    if (v >= n) throw PreconditionError("source vertex out of range");
    if (d[v] == 0.0) continue;
    d[v] = 0.0;
    rank[v] = r;
    pq.emplace(0.0, r, v);
  }
  while (!pq.empty()) {
    const auto [du, ru, u] = pq.top();
    pq.pop();
    if (du > d[u] || (du == d[u] && ru > rank[u])) continue;
    for (const auto& e : adj_[u]) {
      const double nd = du + e.w;
      if (limit >= 0.0 && nd > limit) continue;
      if (nd < d[e.to] || (nd == d[e.to] && ru < rank[e.to])) {
        d[e.to] = nd;
        rank[e.to] = ru;
        if (prev) (*prev)[e.to] = u;
        pq.emplace(nd, ru, e.to);
      }
    }
  }
  if (owner) {
    owner->assign(n, n);
    for (std::size_t v = 0; v < n; ++v)
      if (rank[v] < sources.size()) (*owner)[v] = sources[rank[v]];
  }
  return d;
}

std::vector<double> GeodesicGrid::distances_from(std::size_t source, double limit) const {
  return dijkstra({source}, limit, nullptr, nullptr);
}

std::vector<double> GeodesicGrid::distances_from(const std::vector<std::size_t>& sources,
                                                 std::vector<std::size_t>* owner,
                                                 double limit) const {
  return dijkstra(sources, limit, owner, nullptr);
}

std::vector<std::pair<std::size_t, double>> GeodesicGrid::ball(std::size_t source,
                                                               double radius) const {
  const std::size_t n = points_.size();
  if (source >= n) throw PreconditionError("source vertex out of range");
  // Scratch distances reset through the touched list, so the cost tracks the ball size.
  thread_local std::vector<double> d;
  thread_local std::vector<std::size_t> touched;
  if (d.size() < n) d.assign(n, kInf);
  touched.clear();
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[source] = 0.0;
  touched.push_back(source);
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > d[u]) continue;
    for (const auto& e : adj_[u]) {
      const double nd = du + e.w;
      if (nd > radius || nd >= d[e.to]) continue;
      if (d[e.to] == kInf) touched.push_back(e.to);
      d[e.to] = nd;
      pq.emplace(nd, e.to);
    }
  }
  std::sort(touched.begin(), touched.end());
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(touched.size());
  for (const auto v : touched) {
    out.emplace_back(v, d[v]);
    d[v] = kInf;
  }
  return out;
}

double GeodesicGrid::distance(std::size_t a, std::size_t b) const {
  return dijkstra({a}, -1.0, nullptr, nullptr)[b];
}

Polyline GeodesicGrid::path(std::size_t a, std::size_t b) const {
  std::vector<std::size_t> prev;
  const auto d = dijkstra({a}, -1.0, nullptr, &prev);
  if (!std::isfinite(d[b])) return {};
  std::vector<Point> out;
  for (std::size_t v = b; v != a; v = prev[v]) out.push_back(points_[v]);
  out.push_back(points_[a]);
  std::reverse(out.begin(), out.end());
  return Polyline{std::move(out)};
}

std::string polyline_csv(const Polyline& path) {
  std::ostringstream os;
  os.precision(17);
  const std::size_t n = path.vertices.empty() ? 0 : path.vertices.front().dim();
  static const char* names[] = {"x", "y", "z"};
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ',';
    if (n <= 3) {
      os << names[i];
    } else {
      os << 'x' << i + 1;
    }
  }
  os << '\n';
  for (const auto& v : path.vertices) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i) os << ',';
      os << v[i];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace grushin
