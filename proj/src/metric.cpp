#include "grushin/metric.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace grushin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative tolerance for segment quadrature and the failure threshold on its error estimate.
constexpr double kQuadTol = 1e-10;
constexpr double kQuadFail = 1e-6;
constexpr unsigned kQuadDepth = 18;

// Boost reports the error estimate of each subinterval without its length scaling, so the
// integral is always taken over [0, 1] to keep the estimate comparable to the value.
template <class F>
double integrate(F&& f, double lo, double hi) {
  if (hi <= lo) return 0.0;
  const double h = hi - lo;
  auto unit = [&](double s) { return f(lo + s * h) * h; };
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      unit, 0.0, 1.0, kQuadDepth, kQuadTol, &err);
  if (!std::isfinite(v) || err > kQuadFail * std::abs(v) + 1e-300) {
    throw NumericalError("segment quadrature did not converge");
  }
  return v;
}

// Integral of d_E(.,Y)^-beta over the straight piece starting at a Y-contact point `start`
// and running a Euclidean distance `len` along unit direction `u`. With w = tau^(1-beta)
// the integrand becomes (tau / d(tau))^beta / (1 - beta), bounded for transversal contact.
// The ratio is constant near the contact for polyhedral Y, and below tau_min rounding in
// start + u * tau (relative to the coordinate scale) dominates d, so tau is clamped there.
double singular_piece(const SingularSet& y, double beta, const Point& start, const Point& u,
                      double len) {
  const double one_m = 1.0 - beta;
  const double wmax = std::pow(len, one_m);
  double scale = len;
  for (std::size_t i = 0; i < start.dim(); ++i) scale = std::max(scale, std::abs(start[i]));
  const double tau_min = std::min(std::max(1e-6 * len, 1e-7 * scale), 1e-3 * len);
  auto g = [&](double w) {
    const double tau = std::max(std::pow(std::max(w, 0.0), 1.0 / one_m), tau_min);
    const double d = y.distance(start + u * tau);
    if (d <= 0.0) return kInf;
    return std::pow(tau / d, beta);
  };
  return integrate(g, 0.0, wmax) / one_m;
}

double regular_piece(const SingularSet& y, double beta, const Point& a, const Point& u,
                     double t0, double t1) {
  auto f = [&](double t) {
    const double d = y.distance(a + u * t);
    if (d <= 0.0) return kInf;
    return std::pow(d, -beta);
  };
  return integrate(f, t0, t1);
}

// Regular piece [t0, t1] with a close approach of Y at t0 (toward = +1) or at t1 (-1):
// geometric breakpoints from the approach at the scale of the gap.
double approach_piece(const SingularSet& y, double beta, const Point& a, const Point& u,
                      double t0, double t1, int toward) {
  if (toward == 0) return regular_piece(y, beta, a, u, t0, t1);
  const double at = toward > 0 ? t0 : t1;
  double h = std::max(y.distance(a + u * at), 1e-300);
  double total = 0.0;
  double prev = 0.0;
  const double span = t1 - t0;
  while (prev < span) {
    const double next = std::min(span, h);
    total += toward > 0 ? regular_piece(y, beta, a, u, t0 + prev, t0 + next)
                        : regular_piece(y, beta, a, u, t1 - next, t1 - prev);
    prev = next;
    h *= 4.0;
  }
  return total;
}

}  // namespace

bool BoundingBox::contains(const Point& p, double slack) const {
  if (p.dim() != dim()) throw DimensionError("point dimension does not match box");
  for (std::size_t i = 0; i < dim(); ++i)
    if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
  return true;
}

BoundingBox BoundingBox::expanded(double by) const {
  BoundingBox b = *this;
  for (std::size_t i = 0; i < dim(); ++i) {
    b.lo[i] -= by;
    b.hi[i] += by;
  }
  return b;
}

GrushinSpace::GrushinSpace(SingularSet y, double beta, BoundingBox bbox, double pad)
    : y_(std::move(y)), beta_(beta), bbox_(std::move(bbox)), pad_(pad) {
  if (!(beta_ >= 0.0 && beta_ < 1.0)) throw PreconditionError("beta must lie in [0, 1)");
  if (bbox_.lo.dim() != y_.dim() || bbox_.hi.dim() != y_.dim())
    throw DimensionError("bbox dimension does not match singular set");
  for (std::size_t i = 0; i < y_.dim(); ++i)
    if (!(bbox_.hi[i] > bbox_.lo[i])) throw PreconditionError("bbox must have positive volume");
  if (pad_ < 0.0) pad_ = bbox_.diameter();
  if (pad_ < bbox_.diameter() * (1.0 - 1e-12))
    throw PreconditionError("pad must be at least diameter(bbox)");
}

GrushinSpace GrushinSpace::scaled(double s) const {
  if (!(s > 0.0)) throw PreconditionError("scale must be positive");
  return GrushinSpace(y_.scaled(s), beta_, BoundingBox{bbox_.lo * s, bbox_.hi * s}, pad_ * s);
}

GrushinSpace GrushinSpace::with_singular(SingularSet y) const {
  return GrushinSpace(std::move(y), beta_, bbox_, pad_);
}

double Polyline::euclid_length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) total += dist(vertices[i - 1], vertices[i]);
  return total;
}

Polyline Polyline::deduplicated() const {
  Polyline out;
  for (const auto& v : vertices)
    if (out.vertices.empty() || !(out.vertices.back() == v)) out.vertices.push_back(v);
  return out;
}

Polyline Polyline::reversed() const {
  return Polyline{std::vector<Point>(vertices.rbegin(), vertices.rend())};
}

double weight(const GrushinSpace& s, const Point& p) {
  const double d = s.singular().distance(p);
  if (s.beta() == 0.0) return 1.0;
  if (d == 0.0) return kInf;
  return std::pow(d, -s.beta());
}

double segment_length(const GrushinSpace& s, const Point& a, const Point& b) {
  require_same_dim(a, b);
  const double len = dist(a, b);
  if (len == 0.0) return 0.0;
  const double beta = s.beta();
  if (beta == 0.0) return len;
  const auto& y = s.singular();
  const auto contact = y.contact(a, b);
  if (contact.overlaps) return kInf;

  const Point u = (b - a) * (1.0 / len);
  std::vector<double> cuts{0.0, 1.0};
  cuts.insert(cuts.end(), contact.hits.begin(), contact.hits.end());
  cuts.insert(cuts.end(), contact.approaches.begin(), contact.approaches.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto member = [](const std::vector<double>& v, double t) {
    return std::any_of(v.begin(), v.end(), [t](double h) { return std::abs(h - t) < 1e-14; });
  };
  // 0: regular end, 1: close approach, 2: contact.
  auto kind = [&](double t) {
    if (member(contact.hits, t)) return 2;
    return member(contact.approaches, t) ? 1 : 0;
  };

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double t0 = cuts[i] * len;
    const double t1 = cuts[i + 1] * len;
    if (t1 - t0 <= 0.0) continue;
    const int k0 = kind(cuts[i]);
    const int k1 = kind(cuts[i + 1]);
    if (k0 == 0 && k1 == 0) {
      total += regular_piece(y, beta, a, u, t0, t1);
      continue;
    }
    const double mid = 0.5 * (t0 + t1);
    if (k0 == 2) {
      total += singular_piece(y, beta, y.nearest(a + u * t0), u, mid - t0);
    } else {
      total += approach_piece(y, beta, a, u, t0, mid, k0 ? 1 : 0);
    }
    if (k1 == 2) {
      total += singular_piece(y, beta, y.nearest(a + u * t1), u * -1.0, t1 - mid);
    } else {
      total += approach_piece(y, beta, a, u, mid, t1, k1 ? -1 : 0);
    }
  }
  return total;
}

double grushin_length(const GrushinSpace& s, const Polyline& path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.vertices.size(); ++i) {
    total += segment_length(s, path.vertices[i - 1], path.vertices[i]);
    if (total == kInf) return kInf;
  }
  return total;
}

double radial_bound(double d, double a, double beta) {
  // ((d + a)^(1-beta) - a^(1-beta)) / (1-beta), written to avoid cancellation when a >> d.
  const double one_m = 1.0 - beta;
  if (d <= 0.0) return 0.0;
  if (a == 0.0) return std::pow(d, one_m) / one_m;
  return std::pow(a, one_m) * std::expm1(one_m * std::log1p(d / a)) / one_m;
}

double distance_to_singular(const GrushinSpace& s, const Point& p) {
  const double one_m = 1.0 - s.beta();
  return std::pow(s.singular().distance(p), one_m) / one_m;
}

double radial_lower_bound(const GrushinSpace& s, const Point& x, const Point& y) {
  require_same_dim(x, y);
  const double d = dist(x, y);
  if (d == 0.0) return 0.0;
  const auto& sing = s.singular();
  return std::max(radial_bound(d, sing.distance(x), s.beta()), radial_bound(d, sing.distance(y), s.beta()));
}

double distance_lower_bound(const GrushinSpace& s, const Point& x, const Point& y) {
  if (x == y) throw PreconditionError("distance_lower_bound requires distinct points");
  return radial_lower_bound(s, x, y);
}

double chord_lower_bound(const GrushinSpace& s, const Point& x, const Point& y) {
  require_same_dim(x, y);
  const double d = dist(x, y);
  if (d == 0.0) return 0.0;
  const auto& sing = s.singular();
  const double b = s.beta();
  return std::max(d / std::pow(sing.distance(x) + d, b), d / std::pow(sing.distance(y) + d, b));
}

double point_singularity_distance(const GrushinSpace& s, const Point& x, const Point& y) {
  const auto c = s.singular().as_single_point();
  if (!c) return -1.0;
  require_same_dim(x, y);
  const double one_m = 1.0 - s.beta();
  const Point px = x - *c;
  const Point py = y - *c;
  const double rx = norm(px);
  const double ry = norm(py);
  const double ra = std::pow(rx, one_m) / one_m;
  const double rb = std::pow(ry, one_m) / one_m;
  if (rx == 0.0 || ry == 0.0) return ra + rb;
  const double cosang = std::clamp(dot(px, py) / (rx * ry), -1.0, 1.0);
  const double theta = std::acos(cosang);
  const double unrolled = one_m * theta;
  // Law of cosines written with sin^2(half angle) for accuracy at small angles.
  const double h = std::sin(0.5 * unrolled);
  const double sq = (ra - rb) * (ra - rb) + 4.0 * ra * rb * h * h;
  return std::sqrt(std::max(sq, 0.0));
}

double certified_lower_bound(const GrushinSpace& s, const Point& x, const Point& y) {
  double lb = std::max(radial_lower_bound(s, x, y), chord_lower_bound(s, x, y));
  lb = std::max(lb, point_singularity_distance(s, x, y));
  return lb;
}

}  // namespace grushin
