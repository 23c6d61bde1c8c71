#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "grushin/analysis.hpp"

using namespace grushin;

namespace {

BoundingBox square(double lo, double hi) { return {Point{lo, lo}, Point{hi, hi}}; }

GrushinSpace v_axis(double beta, double lo = -2.0, double hi = 2.0) {
  return GrushinSpace(SingularSet::coordinate_plane(2, 0), beta, square(lo, hi));
}

}  // namespace

TEST_CASE("holder_constant_uniform examples") {
  CHECK(holder_constant_uniform(2.0, 2, 0.5) == doctest::Approx(16.0));
  CHECK(holder_constant_uniform(1.0, 1, 0.0) == 1.0);
  CHECK(holder_constant_uniform(1.0, 1, 0.5) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(holder_constant_uniform(0.5, 1, 0.5), PreconditionError);
}

TEST_CASE("eta_control examples") {
  CHECK(eta_control(0.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (double t : {1e-3, 0.2, 1.0, 7.5}) CHECK(eta_control(0.0, 1.0, t) == doctest::Approx(t).epsilon(1e-12));
  const double H = 2.0 * std::sqrt(2.0);
  const double eta1 = H / (2.0 * (std::sqrt(3.0) - std::sqrt(2.0)));
  CHECK(eta1 == doctest::Approx(4.449).epsilon(1e-3));
  CHECK(eta_control(0.5, H, 1.0) == doctest::Approx(eta1).epsilon(1e-14));
  CHECK_THROWS_AS(eta_control(0.5, H, 0.0), PreconditionError);
}

TEST_CASE("property: eta decreases to 0 along t = 10^-k") {
  for (double beta : {0.25, 0.5, 0.75}) {
    double prev = eta_control(beta, 16.0, 1.0);
    for (int k = 1; k <= 6; ++k) {
      const double v = eta_control(beta, 16.0, std::pow(10.0, -k));
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 1.0);
  }
}

TEST_CASE("check_holder examples") {
  SUBCASE("Euclidean") {
    GrushinSpace e(SingularSet::point(Point{0.0, 0.0}), 0.0, square(-1.0, 1.0));
    const auto r = check_holder(e, 1.0, 50, 1);
    CHECK_FALSE(r.violated);
    CHECK(r.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("half-planes with the uniform-domain constant") {
    const auto r = check_holder(v_axis(0.5), 16.0, 60, 2);
    CHECK_FALSE(r.violated);
    CHECK(r.unresolved == 0);
    CHECK(r.worst_ratio <= 16.0);
  }
  SUBCASE("too small a constant is refuted") {
    const auto r = check_holder(v_axis(0.5), 0.1, 20, 3);
    CHECK(r.violated);
    CHECK(r.worst_certified_ratio > 0.1);
    for (const auto& w : r.violations) CHECK(w.lower > 0.1 * std::pow(dist(w.x, w.y), 0.5));
  }
}

TEST_CASE("property: uniform-domain constant holds for a hyperplane at every beta") {
  for (double beta : {0.0, 0.25, 0.5, 0.75}) {
    const double H = holder_constant_uniform(2.0, 2, beta);
    CHECK_FALSE(check_holder(v_axis(beta), H, 40, 4).violated);
  }
}

TEST_CASE("check_quasisymmetry") {
  SUBCASE("Euclidean identity") {
    GrushinSpace e(SingularSet::point(Point{0.0, 0.0}), 0.0, square(-1.0, 1.0));
    const auto r = check_quasisymmetry(e, 1.0, 200, 5);
    CHECK_FALSE(r.violated);
    CHECK(r.certified_ok == 200);
  }
  SUBCASE("v-axis with the Hoelder constant") {
    const auto r = check_quasisymmetry(v_axis(0.5), 16.0, 200, 6);
    CHECK_FALSE(r.violated);
    CHECK(r.worst_excess <= 0.0);
  }
  SUBCASE("degenerate triple") {
    CHECK_THROWS_AS(check_triple(v_axis(0.5), 16.0, Point{1.0, 0.0}, Point{0.5, 0.5},
                                 Point{0.5, 0.5}),
                    PreconditionError);
  }
}

TEST_CASE("doubling estimates") {
  SUBCASE("Euclidean plane") {
    GrushinSpace e(SingularSet::point(Point{5.0, 5.0}), 0.0, square(0.0, 1.0));
    const auto r = estimate_doubling(e, 6, 7, 25);
    CHECK(r.balls_tested == 6);
    CHECK(r.D_estimate >= 1);
    CHECK(r.D_estimate <= 7);
  }
  SUBCASE("ball holding one sample") {
    GrushinSpace e(SingularSet::point(Point{5.0, 5.0}), 0.0, square(0.0, 1.0));
    GeodesicGrid g(e, 5);
    CHECK(cover_count(e, g, 12, 0.1) == 1);
  }
  SUBCASE("v-axis: stable under nested grid refinement") {
    std::vector<std::size_t> d;
    for (std::size_t per_axis : {9, 17, 33})
      d.push_back(estimate_doubling(v_axis(0.5, 0.0, 1.0), 6, 8, per_axis).D_estimate);
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    CHECK(*hi - *lo <= 1);
  }
}

TEST_CASE("conformal curvature") {
  const auto s = v_axis(0.5);
  CHECK(gaussian_curvature_conformal(s, Point{1.0, 0.0}, 1e-3) ==
        doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(gaussian_curvature_conformal(v_axis(0.0), Point{1.0, 0.3}) == 0.0);
  GrushinSpace cone(SingularSet::point(Point{0.0, 0.0}), 0.5, square(-2.0, 2.0));
  CHECK(std::abs(gaussian_curvature_conformal(cone, Point{1.0, 0.5})) < 1e-6);
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(gaussian_curvature_conformal(s, Point{0.001, 0.0}, 1e-3), PreconditionError);
    GrushinSpace two(SingularSet(2, {shape::PointShape{Point{-1.0, 0.0}},
                                     shape::PointShape{Point{1.0, 0.0}}}),
                     0.5, square(-2.0, 2.0));
    CHECK_THROWS_AS(gaussian_curvature_conformal(two, Point{0.0, 0.7}), PreconditionError);
    CHECK_NOTHROW(gaussian_curvature_conformal(two, Point{-0.5, 0.7}));
  }
}

TEST_CASE("Brioschi formula") {
  auto one = [](double, double) { return 1.0; };
  CHECK(gaussian_curvature_diagonal(one, one, Point{0.3, 0.2}, 1e-3) == 0.0);
  for (double alpha : {1.0, 2.0}) {
    auto G = [alpha](double x, double) { return std::pow(std::abs(x), -2.0 * alpha); };
    for (double x : {0.5, 1.0, 2.0}) {
      CHECK(gaussian_curvature_diagonal(one, G, Point{x, 0.0}, 1e-4) ==
            doctest::Approx(-alpha * (alpha + 1.0) / (x * x)).epsilon(1e-3));
    }
  }
  auto G = [](double x, double) { return std::exp(2.0 / std::abs(x)); };
  CHECK(gaussian_curvature_diagonal(one, G, Point{0.5, 0.0}, 1e-4) ==
        doctest::Approx(-32.0).epsilon(5e-3));
  auto bad = [](double, double) { return -1.0; };
  CHECK_THROWS_AS(gaussian_curvature_diagonal(one, bad, Point{0.5, 0.0}, 1e-3),
                  PreconditionError);
}

TEST_CASE("property: diagonal and conformal curvature agree") {
  const auto s = GrushinSpace(SingularSet(2, {shape::Segment{Point{-0.5, 0.0}, Point{0.5, 0.0}}}),
                              0.5, square(-2.0, 2.0));
  for (const Point& p : {Point{0.2, 0.4}, Point{0.9, -0.3}, Point{-1.2, 1.1}}) {
    const double d = s.singular().distance(p);
    auto lam = [&](double x, double y) {
      return std::pow(s.singular().distance(Point{x, y}), -2.0 * s.beta());
    };
    const double kc = gaussian_curvature_conformal(s, p);
    const double kd = gaussian_curvature_diagonal(lam, lam, p, 1e-3 * d);
    CHECK(kd == doctest::Approx(kc).epsilon(5e-3));
  }
}

TEST_CASE("property: step halving converges") {
  auto one = [](double, double) { return 1.0; };
  auto G = [](double x, double) { return std::pow(x, -2.0); };
  const Point p{0.7, 0.0};
  double prev_gap = 1e300;
  for (double h : {0.04, 0.02, 0.01}) {
    const double gap = std::abs(gaussian_curvature_diagonal(one, G, p, h) -
                                gaussian_curvature_diagonal(one, G, p, h / 2));
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("Whitney curvature bound") {
  const auto r = check_whitney_curvature(v_axis(0.5, 0.1, 2.0), 3.0, 40, 9);
  REQUIRE(r.K_closed_form.has_value());
  CHECK(r.points.size() == 40);
  for (std::size_t i = 0; i < r.points.size(); ++i)
    CHECK(r.K_numeric[i] == doctest::Approx((*r.K_closed_form)[i]).epsilon(1e-3));
  CHECK(r.A_fit == doctest::Approx(2.0).epsilon(1e-3));
  CHECK_FALSE(r.violated);
  CHECK(check_whitney_curvature(v_axis(0.0, 0.1, 2.0), 1.0, 10, 9).A_fit == 0.0);
  // Curvature of dx^2 + exp(2/x) dy^2 times x^2 is unbounded as x -> 0.
  auto one = [](double, double) { return 1.0; };
  auto G = [](double x, double) { return std::exp(2.0 / x); };
  double prev = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double x = std::exp2(-k);
    const double prod = std::abs(gaussian_curvature_diagonal(one, G, Point{x, 0.0}, 1e-4 * x)) * x * x;
    CHECK(prod > prev);
    prev = prod;
  }
}

TEST_CASE("non-doubling packing") {
  const std::uint64_t expected[] = {5, 29, 436};
  for (int n = 0; n <= 2; ++n) {
    const auto r = nondoubling_balls(1.0, n);
    CHECK(r.count == expected[n]);
    CHECK(r.count >= r.required);
    CHECK(r.disjoint);
    CHECK(r.min_pair_lower >= 2.0 * r.radius);
    CHECK(r.y_centers.size() == r.count);
  }
  CHECK(nondoubling_ball_count(1.0, 3) == std::uint64_t(std::floor(16.0 * std::exp(8.0))));
  CHECK_THROWS_AS(nondoubling_ball_count(1.0, 6), ResourceLimit);
  CHECK(nondoubling_flag(1.0));
  CHECK_FALSE(nondoubling_flag(0.01, 10.0, 6));
  CHECK_THROWS_AS(nondoubling_ball_count(0.0, 1), PreconditionError);
}
