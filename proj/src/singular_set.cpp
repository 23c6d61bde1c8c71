#include "grushin/singular_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace grushin {

std::string to_string(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) os << ", ";
    os << p[i];
  }
  os << ')';
  return os.str();
}

namespace {

using namespace shape;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kApproachFraction = 0.1;

double contact_tol(const Point& a, const Point& b) {
  return 1e-12 * std::max({1.0, norm(a), norm(b)});
}

// Closest point on the parametrized piece p + s v, s in [s0, s1].
Point project_piece(const Point& x, const Point& p, const Point& v, double s0, double s1) {
  const double vv = dot(v, v);
  double s = vv > 0.0 ? dot(x - p, v) / vv : 0.0;
  s = std::clamp(s, s0, s1);
  return p + v * s;
}

Point nearest_on(const Primitive& prim, const Point& x) {
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointShape>) {
          return s.at;
        } else if constexpr (std::is_same_v<T, Segment>) {
          return project_piece(x, s.a, s.b - s.a, 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, HalfLine>) {
          return project_piece(x, s.origin, s.direction, 0.0, kInf);
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          const Point n = s.normal * (1.0 / norm(s.normal));
          return x - n * dot(n, x - s.point);
        } else if constexpr (std::is_same_v<T, Box>) {
          Point q = x;
          for (std::size_t i = 0; i < x.dim(); ++i) q[i] = std::clamp(x[i], s.lo[i], s.hi[i]);
          return q;
        } else {
          const Point* best = nullptr;
          double bd = kInf;
          for (const auto& c : s.points) {
            const double d = dist(x, c);
            if (d < bd || (d == bd && best && lex_less(c, *best))) {
              bd = d;
              best = &c;
            }
          }
          return *best;
        }
      },
      prim);
}

double distance_to(const Primitive& prim, const Point& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointShape>) {
          return dist(x, s.at);
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          return std::abs(dot(s.normal, x - s.point)) / norm(s.normal);
        } else if constexpr (std::is_same_v<T, Box>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < x.dim(); ++i) {
            const double d = std::max({s.lo[i] - x[i], 0.0, x[i] - s.hi[i]});
            acc += d * d;
          }
          return std::sqrt(acc);
        } else if constexpr (std::is_same_v<T, Cloud>) {
          double bd = kInf;
          for (const auto& c : s.points) bd = std::min(bd, dist(x, c));
          return bd;
        } else {
          return dist(x, nearest_on(prim, x));
        }
      },
      prim);
}

// Contact between segment a + t u (t in [0,1]) and piece p + s v (s in [s0,s1]).
void contact_piece(const Point& a, const Point& b, const Point& p, const Point& v, double s0,
                   double s1, SegmentContact& out) {
  const double tol = contact_tol(a, b);
  const Point u = b - a;
  const double uu = dot(u, u);
  const double vv = dot(v, v);
  if (vv == 0.0) {
    // Degenerate piece is a point.
    const double t = uu > 0 ? std::clamp(dot(p - a, u) / uu, 0.0, 1.0) : 0.0;
    const double gap = dist(a + u * t, p);
    if (gap <= tol) {
      out.hits.push_back(t);
    } else if (t > 0.0 && t < 1.0 && gap < kApproachFraction * std::sqrt(uu)) {
      out.approaches.push_back(t);
    }
    return;
  }
  if (uu == 0.0) {
    if (dist(project_piece(a, p, v, s0, s1), a) <= tol) out.hits.push_back(0.0);
    return;
  }
  const double uv = dot(u, v);
  const double denom = uu * vv - uv * uv;
  if (denom <= 1e-14 * uu * vv) {
    // Parallel: check line distance, then overlap of the parameter ranges.
    const Point r = a - p;
    const Point perp = r - v * (dot(r, v) / vv);
    if (norm(perp) > tol) return;
    const double sa = dot(a - p, v) / vv;
    const double sb = dot(b - p, v) / vv;
    const double lo = std::max(std::min(sa, sb), s0);
    const double hi = std::min(std::max(sa, sb), s1);
    if (hi < lo) return;
    const double len = (hi - lo) * std::sqrt(vv);
    auto t_of = [&](double s) { return std::clamp((s - sa) / (sb - sa), 0.0, 1.0); };
    if (len > tol) {
      out.overlaps = true;
      out.hits.push_back(t_of(lo));
      out.hits.push_back(t_of(hi));
    } else {
      out.hits.push_back(t_of(lo));
    }
    return;
  }
  const Point r = a - p;
  const double c = dot(u, r);
  const double f = dot(v, r);
  double t = std::clamp((uv * f - c * vv) / denom, 0.0, 1.0);
  double s = (uv * t + f) / vv;
  if (s < s0 || s > s1) {
    s = std::clamp(s, s0, s1);
    t = std::clamp((uv * s - c) / uu, 0.0, 1.0);
  }
  const Point ps = p + v * s;
  const double gap = dist(a + u * t, ps);
  if (gap <= tol) {
    out.hits.push_back(t);
  } else if (t > 0.0 && t < 1.0 && gap < kApproachFraction * std::sqrt(uu)) {
    out.approaches.push_back(t);
  }
}

void contact_with(const Primitive& prim, const Point& a, const Point& b, SegmentContact& out) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointShape>) {
          Point zero(a.dim());
          contact_piece(a, b, s.at, zero, 0.0, 0.0, out);
        } else if constexpr (std::is_same_v<T, Segment>) {
          contact_piece(a, b, s.a, s.b - s.a, 0.0, 1.0, out);
        } else if constexpr (std::is_same_v<T, HalfLine>) {
          contact_piece(a, b, s.origin, s.direction, 0.0, kInf, out);
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          const double tol = contact_tol(a, b);
          const double nn = norm(s.normal);
          const double da = dot(s.normal, a - s.point) / nn;
          const double db = dot(s.normal, b - s.point) / nn;
          if (std::abs(da) <= tol && std::abs(db) <= tol) {
            if (dist(a, b) > tol) out.overlaps = true;
            out.hits.push_back(0.0);
            out.hits.push_back(1.0);
          } else if (std::abs(da) <= tol) {
            out.hits.push_back(0.0);
          } else if (std::abs(db) <= tol) {
            out.hits.push_back(1.0);
          } else if ((da < 0) != (db < 0)) {
            out.hits.push_back(da / (da - db));
          }
        } else if constexpr (std::is_same_v<T, Box>) {
          // Slab clipping; on a miss, locate the closest approach of the convex distance.
          const double tol = contact_tol(a, b);
          double t0 = 0.0, t1 = 1.0;
          bool miss = false;
          for (std::size_t i = 0; i < a.dim() && !miss; ++i) {
            const double d = b[i] - a[i];
            if (std::abs(d) < 1e-300) {
              if (a[i] < s.lo[i] - tol || a[i] > s.hi[i] + tol) miss = true;
              continue;
            }
            double ta = (s.lo[i] - a[i]) / d;
            double tb = (s.hi[i] - a[i]) / d;
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) miss = true;
          }
          if (miss) {
            auto f = [&](double t) { return distance_to(prim, lerp(a, b, t)); };
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 80; ++it) {
              const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
              if (f(m1) <= f(m2)) hi = m2; else lo = m1;
            }
            const double t = 0.5 * (lo + hi);
            if (t > 1e-9 && t < 1.0 - 1e-9 && f(t) < kApproachFraction * dist(a, b))
              out.approaches.push_back(t);
            return;
          }
          if ((t1 - t0) * dist(a, b) > tol) out.overlaps = true;
          out.hits.push_back(t0);
          out.hits.push_back(t1);
          return;
        } else {
          Point zero(a.dim());
          for (const auto& c : s.points) contact_piece(a, b, c, zero, 0.0, 0.0, out);
        }
      },
      prim);
}

std::size_t primitive_dim(const Primitive& prim) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointShape>) return s.at.dim();
        else if constexpr (std::is_same_v<T, Segment>) return s.a.dim();
        else if constexpr (std::is_same_v<T, HalfLine>) return s.origin.dim();
        else if constexpr (std::is_same_v<T, Hyperplane>) return s.point.dim();
        else if constexpr (std::is_same_v<T, Box>) return s.lo.dim();
        else return s.points.empty() ? 0 : s.points.front().dim();
      },
      prim);
}

void validate(const Primitive& prim, std::size_t dim) {
  auto check = [dim](const Point& p) {
    if (p.dim() != dim) throw DimensionError("primitive dimension does not match set dimension");
    if (!p.finite()) throw PreconditionError("primitive coordinates must be finite");
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointShape>) {
          check(s.at);
        } else if constexpr (std::is_same_v<T, Segment>) {
          check(s.a);
          check(s.b);
        } else if constexpr (std::is_same_v<T, HalfLine>) {
          check(s.origin);
          check(s.direction);
          if (norm(s.direction) == 0.0) throw PreconditionError("half-line direction is zero");
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          check(s.point);
          check(s.normal);
          if (norm(s.normal) == 0.0) throw PreconditionError("hyperplane normal is zero");
        } else if constexpr (std::is_same_v<T, Box>) {
          check(s.lo);
          check(s.hi);
          for (std::size_t i = 0; i < dim; ++i)
            if (s.lo[i] > s.hi[i]) throw PreconditionError("box has lo > hi");
        } else {
          if (s.points.empty()) throw PreconditionError("point cloud is empty");
          for (const auto& p : s.points) check(p);
        }
      },
      prim);
}

}  // namespace

SingularSet::SingularSet(std::size_t dim, std::vector<Primitive> primitives)
    : dim_(dim), primitives_(std::move(primitives)) {
  if (dim == 0 || dim > kMaxDim) throw UnsupportedDimension("singular set dimension out of range");
  if (primitives_.empty()) throw PreconditionError("singular set must be nonempty");
  for (const auto& prim : primitives_) {
    if (primitive_dim(prim) != dim_) throw DimensionError("primitive dimension mismatch");
    validate(prim, dim_);
  }
}

SingularSet SingularSet::point(const Point& p) {
  return SingularSet(p.dim(), {shape::PointShape{p}});
}

SingularSet SingularSet::coordinate_plane(std::size_t dim, std::size_t axis, double offset) {
  Point origin(dim);
  Point normal(dim);
  origin[axis] = offset;
  normal[axis] = 1.0;
  return SingularSet(dim, {shape::Hyperplane{origin, normal}});
}

SingularSet SingularSet::with(const Primitive& extra) const {
  auto prims = primitives_;
  prims.push_back(extra);
  return SingularSet(dim_, std::move(prims));
}

double SingularSet::distance(const Point& p) const {
  if (p.dim() != dim_) throw DimensionError("point dimension does not match singular set");
  double best = kInf;
  for (const auto& prim : primitives_) {
    best = std::min(best, distance_to(prim, p));
    if (best == 0.0) break;
  }
  return best;
}

double SingularSet::piece_gap(const Point& p) const {
  if (p.dim() != dim_) throw DimensionError("point dimension does not match singular set");
  double first = kInf;
  double second = kInf;
  auto add = [&](double d) {
    if (d < first) {
      second = first;
      first = d;
    } else if (d < second) {
      second = d;
    }
  };
  for (const auto& prim : primitives_) {
    if (const auto* c = std::get_if<Cloud>(&prim)) {
      for (const auto& q : c->points) add(dist(p, q));
    } else {
      add(distance_to(prim, p));
    }
  }
  return second - first;
}

Point SingularSet::nearest(const Point& p) const {
  if (p.dim() != dim_) throw DimensionError("point dimension does not match singular set");
  std::optional<Point> best;
  double bd = kInf;
  for (const auto& prim : primitives_) {
    Point q = nearest_on(prim, p);
    const double d = dist(p, q);
    if (d < bd) {
      bd = d;
      best = q;
    }
  }
  return *best;
}

SegmentContact SingularSet::contact(const Point& a, const Point& b) const {
  require_same_dim(a, b);
  if (a.dim() != dim_) throw DimensionError("segment dimension does not match singular set");
  SegmentContact out;
  for (const auto& prim : primitives_) contact_with(prim, a, b, out);
  auto& h = out.hits;
  // Contacts within tolerance of an endpoint are that endpoint, and an endpoint lying on
  // Y is always reported, so callers never see a sliver piece next to an endpoint.
  const double tol = contact_tol(a, b);
  const double len = dist(a, b);
  const double slack = len > 0.0 ? tol / len : 1.0;
  for (auto& t : h) {
    t = std::clamp(t, 0.0, 1.0);
    if (t <= slack) t = 0.0;
    if (t >= 1.0 - slack) t = 1.0;
  }
  if (distance(a) <= tol) h.push_back(0.0);
  if (distance(b) <= tol) h.push_back(1.0);
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end(), [](double x, double y) { return y - x < 1e-14; }),
          h.end());
  auto& ap = out.approaches;
  std::sort(ap.begin(), ap.end());
  ap.erase(std::unique(ap.begin(), ap.end(), [](double x, double y) { return y - x < 1e-12; }),
           ap.end());
  return out;
}

std::optional<Point> SingularSet::as_single_point() const {
  if (primitives_.size() != 1) return std::nullopt;
  if (const auto* p = std::get_if<shape::PointShape>(&primitives_.front())) return p->at;
  if (const auto* c = std::get_if<shape::Cloud>(&primitives_.front())) {
    if (c->points.size() == 1) return c->points.front();
  }
  return std::nullopt;
}

std::optional<std::pair<Point, Point>> SingularSet::bounds() const {
  Point lo(dim_), hi(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    lo[i] = kInf;
    hi[i] = -kInf;
  }
  auto grow = [&](const Point& p) {
    for (std::size_t i = 0; i < dim_; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  };
  for (const auto& prim : primitives_) {
    bool bounded = std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, PointShape>) {
            grow(s.at);
            return true;
          } else if constexpr (std::is_same_v<T, Segment>) {
            grow(s.a);
            grow(s.b);
            return true;
          } else if constexpr (std::is_same_v<T, Box>) {
            grow(s.lo);
            grow(s.hi);
            return true;
          } else if constexpr (std::is_same_v<T, Cloud>) {
            for (const auto& p : s.points) grow(p);
            return true;
          } else {
            return false;
          }
        },
        prim);
    if (!bounded) return std::nullopt;
  }
  return std::make_pair(lo, hi);
}

SingularSet SingularSet::scaled(double s) const {
  std::vector<Primitive> out;
  for (const auto& prim : primitives_) {
    out.push_back(std::visit(
        [s](auto v) -> Primitive {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, PointShape>) {
            v.at *= s;
          } else if constexpr (std::is_same_v<T, Segment>) {
            v.a *= s;
            v.b *= s;
          } else if constexpr (std::is_same_v<T, HalfLine>) {
            v.origin *= s;
          } else if constexpr (std::is_same_v<T, Hyperplane>) {
            v.point *= s;
          } else if constexpr (std::is_same_v<T, Box>) {
            v.lo *= s;
            v.hi *= s;
          } else {
            for (auto& p : v.points) p *= s;
          }
          return v;
        },
        prim));
  }
  return SingularSet(dim_, std::move(out));
}

double euclid_distance(const Point& p, const SingularSet& y) { return y.distance(p); }
Point nearest_point(const Point& p, const SingularSet& y) { return y.nearest(p); }

std::string primitive_kind(const Primitive& prim) {
  static const char* names[] = {"point", "segment", "half-line", "hyperplane", "box", "cloud"};
  return names[prim.index()];
}

}  // namespace grushin
