#include "grushin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "grushin/sampling.hpp"

namespace grushin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slack absorbing rounding when a certified side meets the claimed bound exactly.
constexpr double kSlack = 1e-9;

struct Bracket {
  double lower;
  double upper;
};

// Analytic lower bound and straight-segment upper bound.
Bracket quick_bracket(const GrushinSpace& s, const Point& x, const Point& y) {
  return {certified_lower_bound(s, x, y), segment_length(s, x, y)};
}

Bracket solved_bracket(const GrushinSpace& s, const Point& x, const Point& y, double resolution,
                       Bracket quick) {
  const auto b = distance(s, x, y, resolution);
  return {std::max(quick.lower, b.lower), std::min(quick.upper, b.upper)};
}

}  // namespace

double holder_constant_uniform(double C, int N, double beta) {
  if (!(C >= 1.0)) throw PreconditionError("uniformity constant must be >= 1");
  if (N < 1) throw PreconditionError("number of domains must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw PreconditionError("beta must lie in [0, 1)");
  return std::pow(2.0, beta) * std::pow(C, 2.0 - beta) * N / (1.0 - beta);
}

double eta_radial_constant(double t, double beta) {
  const double e = 1.0 - beta;
  return (std::pow(1.0 + 2.0 * t, e) - std::pow(2.0 * t, e)) / e;
}

double eta_control(double beta, double H, double t) {
  if (!(t > 0.0)) throw PreconditionError("t must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw PreconditionError("beta must lie in [0, 1)");
  const double eta1 = H * std::pow(t, 1.0 - beta) / eta_radial_constant(t, beta);
  const double eta2 = std::pow(2.0, beta) * std::pow(1.0 + 1.0 / (2.0 * t), beta) * t;
  return std::max(eta1, eta2);
}

double QuasisymmetryReport::eta(double t) const { return eta_control(beta, H, t); }

HolderReport check_holder(const GrushinSpace& s, double H, std::size_t samples,
                          std::uint64_t seed, double resolution) {
  if (samples < 1) throw PreconditionError("samples must be >= 1");
  if (!(H > 0.0)) throw PreconditionError("H must be positive");
  const std::size_t n = s.dim();
  const double e = 1.0 - s.beta();
  HolderReport r;
  r.H_claimed = H;
  QuasiRandom q(2 * n, seed);
  while (r.samples < samples) {
    const auto u = q.next_unit();
    const Point x = QuasiRandom::place(s.bbox(), u, 0);
    const Point y = QuasiRandom::place(s.bbox(), u, n);
    const double de = dist(x, y);
    if (de == 0.0) continue;
    ++r.samples;
    const double bound = H * std::pow(de, e);
    Bracket b = quick_bracket(s, x, y);
    if (b.upper > bound * (1.0 + kSlack) && b.lower <= bound * (1.0 + kSlack))
      b = solved_bracket(s, x, y, resolution, b);
    const double scale = std::pow(de, e);
    r.worst_ratio = std::max(r.worst_ratio, b.upper / scale);
    r.worst_certified_ratio = std::max(r.worst_certified_ratio, b.lower / scale);
    if (b.lower > bound * (1.0 + kSlack)) {
      r.violated = true;
      r.violations.push_back({x, y, b.lower, b.upper});
    } else if (b.upper > bound * (1.0 + kSlack)) {
      ++r.unresolved;
    }
  }
  return r;
}

QuasisymmetryReport check_triple(const GrushinSpace& s, double H, const Point& x,
                                 const Point& y, const Point& z, double resolution) {
  if (x == y || x == z || y == z) throw PreconditionError("triple points must be distinct");
  QuasisymmetryReport r;
  r.beta = s.beta();
  r.H = H;
  r.triples_tested = 1;
  const double t = dist(x, y) / dist(x, z);
  const double eta = eta_control(s.beta(), H, t);
  Bracket xy = quick_bracket(s, x, y);
  Bracket xz = quick_bracket(s, x, z);
  auto ok = [&] { return xy.upper <= eta * xz.lower * (1.0 + kSlack); };
  auto bad = [&] { return xy.lower > eta * xz.upper * (1.0 + kSlack); };
  if (!ok() && !bad()) {
    xy = solved_bracket(s, x, y, resolution, xy);
    xz = solved_bracket(s, x, z, resolution, xz);
  }
  r.worst_excess = xy.lower / xz.upper - eta;
  if (ok()) {
    r.certified_ok = 1;
  } else if (bad()) {
    r.violated = true;
    r.violations.push_back({x, y, z, t, eta, xy.lower / xz.upper});
  } else {
    r.unresolved = 1;
  }
  return r;
}

QuasisymmetryReport check_quasisymmetry(const GrushinSpace& s, double H, std::size_t triples,
                                        std::uint64_t seed, double resolution) {
  if (triples < 1) throw PreconditionError("triples must be >= 1");
  const std::size_t n = s.dim();
  QuasisymmetryReport r;
  r.beta = s.beta();
  r.H = H;
  r.worst_excess = -kInf;
  QuasiRandom q(3 * n, seed);
  while (r.triples_tested < triples) {
    const auto u = q.next_unit();
    const Point x = QuasiRandom::place(s.bbox(), u, 0);
    const Point y = QuasiRandom::place(s.bbox(), u, n);
    const Point z = QuasiRandom::place(s.bbox(), u, 2 * n);
    if (x == y || x == z || y == z) continue;
    const auto one = check_triple(s, H, x, y, z, resolution);
    ++r.triples_tested;
    r.worst_excess = std::max(r.worst_excess, one.worst_excess);
    r.certified_ok += one.certified_ok;
    r.unresolved += one.unresolved;
    if (one.violated) {
      r.violated = true;
      r.violations.insert(r.violations.end(), one.violations.begin(), one.violations.end());
    }
  }
  return r;
}

std::size_t cover_count(const GrushinSpace& s, const GeodesicGrid& grid, std::size_t center,
                        double r) {
  if (!(r > 0.0)) throw PreconditionError("radius must be positive");
  const Point& c = grid.point(center);
  const std::size_t m = grid.size();
  auto lower = [&](const Point& a, const Point& b) {
    return a == b ? 0.0 : certified_lower_bound(s, a, b);
  };
  // Upper bound with the straight segment consulted only when it can decide membership.
  auto upper = [&](std::size_t a, std::size_t b, double graph, double below) {
    if (graph < below) return graph;
    if (lower(grid.point(a), grid.point(b)) >= below) return graph;
    return std::min(graph, segment_length(s, grid.point(a), grid.point(b)));
  };

  std::vector<std::size_t> members;
  for (std::size_t v = 0; v < m; ++v)
    if (lower(c, grid.point(v)) < r) members.push_back(v);
  if (members.size() <= 1) return members.size();

  // Candidate half-balls: any vertex within 1.5 r of the center can reach a member.
  std::vector<std::size_t> candidates;
  for (std::size_t v = 0; v < m; ++v)
    if (lower(c, grid.point(v)) < 1.5 * r) candidates.push_back(v);
  std::vector<std::vector<std::size_t>> covers(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto d = grid.distances_from(candidates[i], 0.5 * r);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::size_t v = members[k];
      if (upper(candidates[i], v, d[v], 0.5 * r) < 0.5 * r) covers[i].push_back(k);
    }
  }

  // Greedy set cover, then drop balls made redundant by later choices.
  std::vector<std::size_t> load(members.size(), 0);
  std::vector<std::size_t> chosen;
  std::size_t left = members.size();
  while (left > 0) {
    std::size_t best = 0;
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::size_t gain = 0;
      for (auto k : covers[i]) gain += load[k] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best_gain == 0) break;
    for (auto k : covers[best]) {
      if (!load[k]) --left;
      ++load[k];
    }
    chosen.push_back(best);
  }
  std::size_t count = chosen.size();
  for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
    const auto& cv = covers[*it];
    if (std::all_of(cv.begin(), cv.end(), [&](std::size_t k) { return load[k] > 1; })) {
      for (auto k : cv) --load[k];
      --count;
    }
  }
  count += left;

  // In the plane a disk of radius rho is covered by seven disks of radius rho/2: one at the
  // center and six at distance (sqrt 3 / 2) rho. Try rotated copies scaled to the members'
  // Euclidean extent; they need not sit on the lattice.
  if (s.dim() == 2 && count > 7) {
    double rho = 0.0;
    for (auto v : members) rho = std::max(rho, dist(c, grid.point(v)));
    for (int rot = 0; rot < 12; ++rot) {
      std::vector<Point> centers{c};
      for (int j = 0; j < 6; ++j) {
        const double th = rot * std::numbers::pi / 36.0 + j * std::numbers::pi / 3.0;
        centers.push_back(c + Point{std::cos(th), std::sin(th)} * (0.5 * std::sqrt(3.0) * rho));
      }
      const bool all = std::all_of(members.begin(), members.end(), [&](std::size_t v) {
        const Point& p = grid.point(v);
        return std::any_of(centers.begin(), centers.end(), [&](const Point& q) {
          if (q == p) return true;
          if (lower(q, p) >= 0.5 * r) return false;
          return segment_length(s, q, p) < 0.5 * r;
        });
      });
      if (all) return 7;
    }
  }
  return count;
}

DoublingReport estimate_doubling(const GrushinSpace& s, std::size_t balls, std::uint64_t seed,
                                 std::size_t per_axis) {
  if (balls < 1) throw PreconditionError("balls must be >= 1");
  GeodesicGrid grid(s, per_axis);
  DoublingReport rep;
  rep.grid_per_axis = per_axis;
  QuasiRandom q(s.dim(), seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 0.5);
  const BoundingBox& box = s.bbox();
  for (std::size_t b = 0; b < balls; ++b) {
    // Centers sit on the 9-per-axis lattice and radii come from the analytic bound to the
    // farthest corner, so that nested grids (per_axis = 8m + 1) test the same balls.
    Point p = q.next(box);
    for (std::size_t i = 0; i < p.dim(); ++i) {
      const double w = box.hi[i] - box.lo[i];
      p[i] = box.lo[i] + std::round((p[i] - box.lo[i]) / w * 8.0) / 8.0 * w;
    }
    const std::size_t center = grid.nearest_vertex(p);
    double far = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << p.dim()); ++corner) {
      Point x(p.dim());
      for (std::size_t i = 0; i < p.dim(); ++i) x[i] = (corner >> i) & 1 ? box.hi[i] : box.lo[i];
      if (!(x == grid.point(center)))
        far = std::max(far, certified_lower_bound(s, grid.point(center), x));
    }
    const double r = u(rng) * far;
    const std::size_t k = r > 0.0 ? cover_count(s, grid, center, r) : 1;
    rep.counts.push_back(k);
    rep.D_estimate = std::max(rep.D_estimate, k);
  }
  rep.balls_tested = balls;
  return rep;
}

double gaussian_curvature_conformal(const GrushinSpace& s, const Point& p, double h) {
  if (s.dim() != 2) throw UnsupportedDimension("curvature is computed for n = 2 only");
  if (p.dim() != 2) throw DimensionError("point dimension does not match space");
  const auto& y = s.singular();
  const double d = y.distance(p);
  if (h <= 0.0) h = 1e-3 * d;
  if (!(d >= 10.0 * h) || h <= 0.0) throw PreconditionError("stencil touches the singular set");
  if (s.beta() == 0.0) return 0.0;
  const double reach = 10.0 * h;
  if (y.piece_gap(p) <= 2.0 * reach)
    throw PreconditionError("stencil is within 10 h of the medial axis");
  // One-sided gradients of d_E(.,Y) at step 10 h differ by at most 10 h / (d - 10 h) where
  // d_E is smooth (each convex piece has Hessian norm below its inverse distance).
  const double allow = 2.0 * reach / (d - reach) + 1e-9;
  for (std::size_t i = 0; i < 2; ++i) {
    Point f = p, b = p;
    f[i] += reach;
    b[i] -= reach;
    const double gf = (y.distance(f) - d) / reach;
    const double gb = (d - y.distance(b)) / reach;
    if (std::abs(gf - gb) > allow)
      throw PreconditionError("stencil is within 10 h of the medial axis");
  }
  auto logd = [&](double dx, double dy) { return std::log(y.distance(Point{p[0] + dx, p[1] + dy})); };
  const double lap =
      (logd(h, 0) + logd(-h, 0) + logd(0, h) + logd(0, -h) - 4.0 * std::log(d)) / (h * h);
  // lambda = d^(-2 beta): -Lap(log lambda) / (2 lambda) = beta d^(2 beta) Lap(log d).
  return s.beta() * std::pow(d, 2.0 * s.beta()) * lap;
}

std::optional<double> conformal_curvature_closed_form(const GrushinSpace& s, const Point& p) {
  if (s.dim() != 2) return std::nullopt;
  if (s.beta() == 0.0) return 0.0;
  const auto& prims = s.singular().primitives();
  if (prims.size() != 1) return std::nullopt;
  if (std::holds_alternative<shape::PointShape>(prims[0])) return 0.0;
  if (std::holds_alternative<shape::Hyperplane>(prims[0])) {
    const double u = s.singular().distance(p);
    return -s.beta() * std::pow(u, 2.0 * s.beta() - 2.0);
  }
  return std::nullopt;
}

double gaussian_curvature_diagonal(const MetricCoefficient& E, const MetricCoefficient& G,
                                   const Point& p, double h) {
  if (p.dim() != 2) throw DimensionError("diagonal curvature needs a point of R^2");
  if (!(h > 0.0)) throw PreconditionError("step must be positive");
  auto coef = [](const MetricCoefficient& f, double x, double y) {
    const double v = f(x, y);
    if (!(v > 0.0) || !std::isfinite(v))
      throw PreconditionError("metric coefficient must be positive in the stencil");
    return v;
  };
  auto root = [&](double x, double y) { return std::sqrt(coef(E, x, y) * coef(G, x, y)); };
  auto gx_term = [&](double x, double y) {
    return (coef(G, x + h, y) - coef(G, x - h, y)) / (2.0 * h) / root(x, y);
  };
  auto ey_term = [&](double x, double y) {
    return (coef(E, x, y + h) - coef(E, x, y - h)) / (2.0 * h) / root(x, y);
  };
  const double x = p[0], y = p[1];
  const double dx = (gx_term(x + h, y) - gx_term(x - h, y)) / (2.0 * h);
  const double dy = (ey_term(x, y + h) - ey_term(x, y - h)) / (2.0 * h);
  return -(dx + dy) / (2.0 * root(x, y));
}

CurvatureReport check_whitney_curvature(const GrushinSpace& s, double A, std::size_t samples,
                                        std::uint64_t seed) {
  if (s.dim() != 2) throw UnsupportedDimension("curvature is computed for n = 2 only");
  CurvatureReport r;
  r.A = A;
  std::vector<double> closed;
  bool have_closed = true;
  QuasiRandom q(2, seed);
  std::size_t attempts = 0;
  while (r.points.size() < samples && attempts < 20 * samples + 100) {
    ++attempts;
    const Point p = q.next(s.bbox());
    double k = 0.0;
    try {
      k = gaussian_curvature_conformal(s, p);
    } catch (const PreconditionError&) {
      ++r.skipped;
      continue;
    }
    r.points.push_back(p);
    r.K_numeric.push_back(k);
    const double dy = distance_to_singular(s, p);
    r.A_fit = std::max(r.A_fit, std::abs(k) * dy * dy);
    if (const auto c = conformal_curvature_closed_form(s, p)) {
      closed.push_back(*c);
    } else {
      have_closed = false;
    }
  }
  if (have_closed) r.K_closed_form = std::move(closed);
  r.violated = r.A_fit > A;
  return r;
}

namespace {

double log_required(double eps, int n) {
  return double(n + 1) * std::log(2.0) + std::exp(double(n) * eps * std::log(2.0));
}

}  // namespace

std::uint64_t nondoubling_ball_count(double eps, int n) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (n < 0) throw PreconditionError("n must be nonnegative");
  if (log_required(eps, n) > 53.0 * std::log(2.0))
    throw ResourceLimit("ball count exceeds 2^53");
  const double growth = std::exp(std::exp2(double(n) * eps));
  return static_cast<std::uint64_t>(std::floor(std::exp2(double(n + 1)) * growth));
}

NondoublingReport nondoubling_balls(double eps, int n) {
  NondoublingReport r;
  r.eps = eps;
  r.n = n;
  r.required = nondoubling_ball_count(eps, n);
  r.count = r.required;
  r.radius = std::exp2(-double(n) - 2.0);
  r.x_center = 3.0 * r.radius;
  r.spacing = 1.0 / double(r.count);
  if (r.count <= 100000) {
    r.y_centers.resize(r.count);
    for (std::uint64_t k = 0; k < r.count; ++k) r.y_centers[k] = (double(k) + 0.5) * r.spacing;
  }
  // A path of length L between centers at heights dy apart stays in |x| <= x_c + L/2, where
  // the y-speed factor exp(|x|^-eps) is at least exp((x_c + L/2)^-eps); hence
  // L >= dy exp((x_c + L/2)^-eps), whose root bounds the distance from below.
  auto rhs = [&](double dy, double L) {
    return dy * std::exp(std::pow(r.x_center + 0.5 * L, -eps));
  };
  auto pair_lower = [&](double dy) {
    double lo = dy, hi = std::max(dy, rhs(dy, 0.0));
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid < rhs(dy, mid) ? lo : hi) = mid;
    }
    return lo;
  };
  // Open balls of radius r with centers closer than 2r would share a point, joined to both
  // centers by paths of length < r inside x <= x_c + r; so rhs(dy, 2r) >= 2r certifies
  // disjointness of every pair at height difference >= dy.
  bool disjoint = true;
  double min_lower = kInf;
  if (!r.y_centers.empty() && r.y_centers.size() <= 2000) {
    for (std::size_t i = 0; i < r.y_centers.size(); ++i) {
      for (std::size_t j = i + 1; j < r.y_centers.size(); ++j) {
        const double dy = r.y_centers[j] - r.y_centers[i];
        min_lower = std::min(min_lower, pair_lower(dy));
        disjoint = disjoint && rhs(dy, 2.0 * r.radius) >= 2.0 * r.radius;
      }
    }
  } else if (r.count >= 2) {
    // The bound is increasing in dy, so the nearest pair is the binding one.
    min_lower = pair_lower(r.spacing);
    disjoint = rhs(r.spacing, 2.0 * r.radius) >= 2.0 * r.radius;
  }
  r.min_pair_lower = r.count >= 2 ? min_lower : kInf;
  r.disjoint = disjoint;
  return r;
}

bool nondoubling_flag(double eps, double C, int n_max) {
  for (int n = 1; n <= n_max; ++n)
    if (log_required(eps, n) >= std::log(std::pow(C, double(n)) + 1.0)) return true;
  return false;
}

}  // namespace grushin
