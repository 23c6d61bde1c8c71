#include "grushin/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace grushin {

namespace {

void require_beta(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw PreconditionError("beta must lie in [0, 1)");
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw PreconditionError("alpha must be >= 0");
}

void require_plane(const Point& p) {
  if (p.dim() != 2) throw DimensionError("map expects a point of R^2");
}

double integrate(const std::function<double(double)>& f) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-12,
                                                                       &err);
}

}  // namespace

Point cone_map(double beta, const Point& p) {
  require_beta(beta);
  require_plane(p);
  const double r = std::hypot(p[0], p[1]);
  if (r == 0.0) return Point{0.0, 0.0, 0.0};
  const double rho = std::pow(r, 1.0 - beta);
  const double c = std::sqrt(1.0 / ((1.0 - beta) * (1.0 - beta)) - 1.0);
  return Point{rho * p[0] / r, rho * p[1] / r, rho * c};
}

Point grushin_chart(double alpha, const Point& p) {
  require_alpha(alpha);
  require_plane(p);
  return Point{std::pow(std::abs(p[0]), alpha) * p[0] / (1.0 + alpha), p[1]};
}

Point grushin_chart_inverse(double alpha, const Point& q) {
  require_alpha(alpha);
  require_plane(q);
  const double x = std::pow((1.0 + alpha) * std::abs(q[0]), 1.0 / (1.0 + alpha));
  return Point{std::copysign(x, q[0]), q[1]};
}

double pushforward_weight(double alpha, const Point& q) {
  require_alpha(alpha);
  require_plane(q);
  const double e = alpha / (1.0 + alpha);
  return std::pow(1.0 + alpha, -e) * std::pow(std::abs(q[0]), -e);
}

SnowflakeParameters snowflake_parameter(double beta, double eps) {
  require_beta(beta);
  if (!(eps > 0.5 && eps <= 1.0)) throw PreconditionError("eps must lie in (1/2, 1]");
  SnowflakeParameters out;
  const double bt = 1.0 - eps;
  const double den = 1.0 - bt - beta + bt * beta;
  if (!(den > 0.0)) throw NumericalError("snowflake exponent denominator is not positive");
  out.beta_tilde = bt;
  out.alpha_tilde = (bt + beta - bt * beta) / den;
  out.target_dim = int(std::floor(out.alpha_tilde)) + 2;
  return out;
}

// ---------------------------------------------------------------------------------------

CandidateMap CandidateMap::named(const std::string& name, double param, std::size_t dim) {
  CandidateMap m;
  m.stages_.push_back({name, param});
  if (name == "identity") {
    if (dim == 0 || dim > kMaxDim) throw PreconditionError("bad dimension for identity");
    m.domain_dim_ = m.target_dim_ = dim;
  } else if (name == "cone") {
    require_beta(param);
    m.domain_dim_ = 2;
    m.target_dim_ = 3;
  } else if (name == "grushin-chart" || name == "grushin-chart-inverse") {
    require_alpha(param);
    m.domain_dim_ = m.target_dim_ = 2;
  } else if (name == "project-xy") {
    if (dim < 2 || dim > kMaxDim) throw PreconditionError("project-xy needs dimension >= 2");
    m.domain_dim_ = dim;
    m.target_dim_ = 2;
  } else {
    throw PreconditionError("unknown map '" + name + "'");
  }
  return m;
}

CandidateMap CandidateMap::then(const CandidateMap& next) const {
  if (next.domain_dim_ != target_dim_)
    throw DimensionError("cannot compose " + describe() + " with " + next.describe());
  CandidateMap m = *this;
  m.stages_.insert(m.stages_.end(), next.stages_.begin(), next.stages_.end());
  m.target_dim_ = next.target_dim_;
  return m;
}

std::string CandidateMap::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    if (i) os << " | ";
    os << stages_[i].name;
    if (stages_[i].name != "identity" && stages_[i].name != "project-xy")
      os << '(' << stages_[i].param << ')';
  }
  return os.str();
}

Point CandidateMap::operator()(const Point& p) const {
  if (p.dim() != domain_dim_) throw DimensionError("map domain dimension mismatch");
  Point q = p;
  for (const auto& s : stages_) {
    if (s.name == "cone") {
      q = cone_map(s.param, q);
    } else if (s.name == "grushin-chart") {
      q = grushin_chart(s.param, q);
    } else if (s.name == "grushin-chart-inverse") {
      q = grushin_chart_inverse(s.param, q);
    } else if (s.name == "project-xy") {
      q = Point{q[0], q[1]};
    }
  }
  return q;
}

// ---------------------------------------------------------------------------------------

std::vector<Point> annulus_sample(std::size_t n, double r0, double r1, std::uint64_t seed,
                                  const Point& center) {
  if (!(r0 >= 0.0 && r1 > r0)) throw PreconditionError("need 0 <= r0 < r1");
  require_plane(center);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(r0 * r0 + u(rng) * (r1 * r1 - r0 * r0));
    const double t = 2.0 * std::numbers::pi * u(rng);
    out.push_back(Point{center[0] + r * std::cos(t), center[1] + r * std::sin(t)});
  }
  return out;
}

namespace {

using Bracket = std::function<std::pair<double, double>(std::size_t, std::size_t)>;

DistortionReport distortion(std::size_t n, const std::function<const Point&(std::size_t)>& point,
                            const Bracket& bracket, const CandidateMap& f, std::size_t pairs,
                            std::uint64_t seed) {
  if (n < 2) throw PreconditionError("need at least two sample points");
  std::vector<Point> image(n);
  for (std::size_t i = 0; i < n; ++i) image[i] = f(point(i));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  DistortionReport rep;
  double hi_cert = 0.0;
  double lo_cert = std::numeric_limits<double>::infinity();
  double hi_mid = 0.0;
  double lo_mid = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    const auto [lo, hi] = bracket(i, j);
    if (!(lo > 0.0)) continue;
    const double dt = dist(image[i], image[j]);
    const DistortionPair w{i, j, lo, hi, dt};
    ++rep.pairs;
    if (dt / hi > hi_cert) {
      hi_cert = dt / hi;
      rep.worst_expand = w;
    }
    if (dt / lo < lo_cert) {
      lo_cert = dt / lo;
      rep.worst_contract = w;
    }
    const double mid = dt / (0.5 * (lo + hi));
    hi_mid = std::max(hi_mid, mid);
    lo_mid = std::min(lo_mid, mid);
  }
  if (rep.pairs == 0) return rep;
  rep.L_lower = lo_cert > 0.0 ? std::sqrt(std::max(1.0, hi_cert / lo_cert))
                              : std::numeric_limits<double>::infinity();
  rep.L_estimate = lo_mid > 0.0 ? std::sqrt(std::max(1.0, hi_mid / lo_mid))
                                : std::numeric_limits<double>::infinity();
  rep.scale = lo_mid > 0.0 ? 1.0 / std::sqrt(hi_mid * lo_mid) : 0.0;
  return rep;
}

}  // namespace

DistortionReport measure_distortion(const GrushinSpace& s, const std::vector<Point>& points,
                                    const CandidateMap& f, std::size_t pairs,
                                    std::uint64_t seed) {
  for (const auto& p : points)
    if (p.dim() != s.dim()) throw DimensionError("sample point dimension mismatch");
  const bool exact = !points.empty() && point_singularity_distance(s, points[0], points[0]) >= 0.0;
  auto bracket = [&](std::size_t i, std::size_t j) {
    const double lo = certified_lower_bound(s, points[i], points[j]);
    if (exact) return std::pair{lo, lo};
    return std::pair{lo, std::max(lo, segment_length(s, points[i], points[j]))};
  };
  return distortion(
      points.size(), [&](std::size_t i) -> const Point& { return points[i]; }, bracket, f, pairs,
      seed);
}

DistortionReport measure_distortion(const SampleMetric& m, const CandidateMap& f,
                                    std::size_t pairs, std::uint64_t seed) {
  auto bracket = [&](std::size_t i, std::size_t j) {
    const double d = m.distance(i, j);
    return std::pair{d, d};
  };
  return distortion(
      m.size(), [&](std::size_t i) -> const Point& { return m.point(i); }, bracket, f, pairs,
      seed);
}

// ---------------------------------------------------------------------------------------

LengthCheck cone_length_check(double beta, std::size_t paths, std::uint64_t seed) {
  require_beta(beta);
  const GrushinSpace s(SingularSet::point(Point{0.0, 0.0}), beta,
                       {Point{-2.0, -2.0}, Point{2.0, 2.0}});
  const double c = std::sqrt(1.0 / ((1.0 - beta) * (1.0 - beta)) - 1.0);
  // |J v| for the cone map at p, from the Jacobian of (g x, g y, c r^(1-beta)), g = r^-beta.
  auto speed = [&](const Point& p, const Point& v) {
    const double x = p[0];
    const double y = p[1];
    const double r = std::hypot(x, y);
    const double g = std::pow(r, -beta);
    const double gr = -beta * std::pow(r, -beta - 1.0) / r;  // g'(r) / r
    const double j00 = g + x * x * gr;
    const double j01 = x * y * gr;
    const double j11 = g + y * y * gr;
    const double h = c * (1.0 - beta) * std::pow(r, -beta) / r;
    const double a = j00 * v[0] + j01 * v[1];
    const double b = j01 * v[0] + j11 * v[1];
    const double z = h * (x * v[0] + y * v[1]);
    return std::sqrt(a * a + b * b + z * z);
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LengthCheck out;
  for (std::size_t k = 0; k < paths; ++k) {
    Polyline path;
    const std::size_t verts = 2 + std::size_t(u(rng) * 5.0);
    double t = 2.0 * std::numbers::pi * u(rng);
    for (std::size_t i = 0; i < verts; ++i) {
      const double r = 0.5 + 1.5 * u(rng);
      path.vertices.push_back(Point{r * std::cos(t), r * std::sin(t)});
      t += (u(rng) - 0.5) * std::numbers::pi;
    }
    const double src = grushin_length(s, path);
    double img = 0.0;
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
      const Point a = path.vertices[i];
      const Point v = path.vertices[i + 1] - a;
      img += integrate([&](double t) { return speed(a + v * t, v); });
    }
    out.source_lengths.push_back(src);
    out.image_lengths.push_back(img);
    out.max_rel_error = std::max(out.max_rel_error, std::abs(img - src) / src);
    ++out.paths;
  }
  return out;
}

LengthCheck chart_length_check(double alpha, std::size_t paths, std::uint64_t seed) {
  require_alpha(alpha);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LengthCheck out;
  for (std::size_t k = 0; k < paths; ++k) {
    std::vector<Point> verts;
    const std::size_t n = 2 + std::size_t(u(rng) * 5.0);
    const double side = u(rng) < 0.5 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i)
      verts.push_back(Point{side * (0.25 + 1.75 * u(rng)), 4.0 * u(rng) - 2.0});
    double src = 0.0;
    double img = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Point a = verts[i];
      const Point v = verts[i + 1] - a;
      src += integrate([&](double t) {
        const double x = a[0] + v[0] * t;
        return std::sqrt(v[0] * v[0] + std::pow(std::abs(x), -2.0 * alpha) * v[1] * v[1]);
      });
      img += integrate([&](double t) {
        const Point p = a + v * t;
        const double du = std::pow(std::abs(p[0]), alpha) * v[0];
        return pushforward_weight(alpha, grushin_chart(alpha, p)) * std::hypot(du, v[1]);
      });
    }
    out.source_lengths.push_back(src);
    out.image_lengths.push_back(img);
    out.max_rel_error = std::max(out.max_rel_error, std::abs(img - src) / src);
    ++out.paths;
  }
  return out;
}

}  // namespace grushin
