#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "grushin/geodesic.hpp"

using namespace grushin;

namespace {

BoundingBox square(double lo, double hi) { return {Point{lo, lo}, Point{hi, hi}}; }

const double kCone = 4.0 * std::sin(std::numbers::pi / 8.0);

}  // namespace

TEST_CASE("Euclidean distance brackets 5") {
  GrushinSpace e(SingularSet::point(Point{10.0, 10.0}), 0.0, square(0.0, 4.0));
  const auto b = distance(e, Point{0.0, 0.0}, Point{3.0, 4.0}, 0.05);
  CHECK(b.lower <= 5.0 + 1e-12);
  CHECK(b.upper >= 5.0 - 1e-12);
  CHECK(b.upper == doctest::Approx(5.0).epsilon(0.01));
  const auto r = refine(e, b);
  CHECK(r.upper <= b.upper);
  CHECK(r.upper == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("cone distance from the unrolled chord") {
  GrushinSpace s(SingularSet::point(Point{0.0, 0.0}), 0.5, square(-1.0, 1.0));
  auto b = distance(s, Point{1.0, 0.0}, Point{0.0, 1.0}, 0.02);
  CHECK(b.lower <= kCone);
  CHECK(b.upper >= kCone * (1.0 - 1e-12));
  CHECK(b.upper == doctest::Approx(kCone).epsilon(0.02));
  CHECK(b.witness.vertices.front() == Point{1.0, 0.0});
  CHECK(b.witness.vertices.back() == Point{0.0, 1.0});
  CHECK(grushin_length(s, b.witness) == doctest::Approx(b.upper).epsilon(1e-12));
  double err = b.upper - kCone;
  for (int i = 0; i < 2; ++i) {
    const auto r = refine(s, b);
    CHECK(r.upper <= b.upper);
    CHECK(r.lower == b.lower);
    CHECK(r.upper - kCone <= err);
    err = r.upper - kCone;
    b = r;
  }
  CHECK(b.width() <= 0.04 * kCone);
}

TEST_CASE("radial geodesic to the v-axis") {
  GrushinSpace s(SingularSet::coordinate_plane(2, 0), 0.5, square(-2.0, 2.0));
  const auto b = distance(s, Point{1.0, 0.0}, Point{2.0, 0.0}, 0.02);
  const double exact = 2.0 * (std::sqrt(2.0) - 1.0);
  CHECK(b.upper == doctest::Approx(exact).epsilon(0.01));
  CHECK(b.lower == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("solver errors") {
  GrushinSpace s(SingularSet::point(Point{0.0, 0.0}), 0.5, square(-1.0, 1.0));
  CHECK_THROWS_AS(distance(s, Point{0.0, 0.0}, Point{3.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(distance(s, Point{0.0, 0.0}, Point{0.5, 0.0}, 0.0), PreconditionError);
  GrushinSpace s4(SingularSet::point(Point{0.0, 0.0, 0.0, 0.0}), 0.5,
                  {Point{-1.0, -1.0, -1.0, -1.0}, Point{1.0, 1.0, 1.0, 1.0}});
  CHECK_THROWS_AS(distance(s4, Point{0.0, 0.0, 0.0, 0.0}, Point{0.5, 0.0, 0.0, 0.0}),
                  UnsupportedDimension);
}

TEST_CASE("property: distance to the nearest point of Y matches the radial closed form") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<SingularSet> ys{
      SingularSet::point(Point{0.0, 0.0}), SingularSet::coordinate_plane(2, 1),
      SingularSet(2, {shape::Segment{Point{-0.5, 0.0}, Point{0.5, 0.0}}})};
  for (const auto& y : ys) {
    for (double beta : {0.25, 0.75}) {
      GrushinSpace s(y, beta, square(-1.0, 1.0));
      for (int i = 0; i < 3; ++i) {
        const Point p{u(rng), u(rng)};
        const auto b = distance(s, p, y.nearest(p), 0.02 * y.distance(p));
        const double exact = distance_to_singular(s, p);
        CHECK(b.upper == doctest::Approx(exact).epsilon(0.02));
        CHECK(b.lower <= exact * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("property: symmetry and lower <= upper") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GrushinSpace s(SingularSet(2, {shape::Segment{Point{-0.5, 0.2}, Point{0.4, -0.3}}}), 0.5,
                 square(-1.0, 1.0));
  for (int i = 0; i < 4; ++i) {
    const Point x{u(rng), u(rng)};
    const Point y{u(rng), u(rng)};
    const auto xy = distance(s, x, y, 0.05);
    const auto yx = distance(s, y, x, 0.05);
    CHECK(xy.lower <= xy.upper);
    CHECK(xy.upper == doctest::Approx(yx.upper).epsilon(1e-6));
    CHECK(xy.lower == doctest::Approx(yx.lower).epsilon(1e-6));
  }
}

TEST_CASE("property: scaling law") {
  const double beta = 0.5;
  const double k = 3.0;
  const SingularSet y(2, {shape::Segment{Point{-0.5, 0.0}, Point{0.5, 0.0}}});
  GrushinSpace s(y, beta, square(-1.0, 1.0));
  GrushinSpace big(y.scaled(k), beta, square(-k, k));
  const Point a{-0.6, 0.5};
  const Point b{0.7, -0.4};
  const auto small_b = distance(s, a, b, 0.02);
  const auto big_b = distance(big, a * k, b * k, 0.02);
  const double f = std::pow(k, 1.0 - beta);
  CHECK(big_b.lower == doctest::Approx(f * small_b.lower).epsilon(1e-9));
  CHECK(big_b.upper == doctest::Approx(f * small_b.upper).epsilon(0.01));
}

TEST_CASE("lattice graph distances") {
  GrushinSpace s(SingularSet::coordinate_plane(2, 0, -0.25), 0.5, square(0.0, 1.0));
  GeodesicGrid g(s, 11);
  CHECK(g.size() == 121);
  CHECK(g.spacing(0) == doctest::Approx(0.1));
  CHECK(g.nearest_vertex(Point{0.31, 0.69}) == 3 + 7 * 11);
  SUBCASE("triangle inequality and symmetry") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    for (int i = 0; i < 30; ++i) {
      const auto a = pick(rng), b = pick(rng), c = pick(rng);
      CHECK(g.distance(a, c) <= g.distance(a, b) + g.distance(b, c) + 1e-9);
      CHECK(g.distance(a, b) == doctest::Approx(g.distance(b, a)).epsilon(1e-12));
    }
  }
  SUBCASE("graph distances are path lengths above the certified lower bound") {
    const auto a = g.nearest_vertex(Point{0.0, 0.0});
    const auto b = g.nearest_vertex(Point{1.0, 1.0});
    const auto p = g.path(a, b);
    CHECK(grushin_length(s, p) == doctest::Approx(g.distance(a, b)).epsilon(1e-12));
    CHECK(certified_lower_bound(s, g.point(a), g.point(b)) <= g.distance(a, b));
  }
  SUBCASE("balls and limits") {
    const auto d = g.distances_from(0, 0.3);
    const auto ball = g.ball(0, 0.3);
    std::size_t finite = 0;
    for (double v : d) finite += std::isfinite(v) ? 1 : 0;
    CHECK(ball.size() == finite);
    for (const auto& [i, r] : ball) CHECK(r <= 0.3);
  }
  SUBCASE("multi-source owners") {
    std::vector<std::size_t> owner;
    const auto d = g.distances_from({0, 120}, &owner);
    CHECK(owner[0] == 0);
    CHECK(owner[120] == 120);
    CHECK(d[60] == doctest::Approx(std::min(g.distance(0, 60), g.distance(120, 60))));
  }
}

TEST_CASE("witness CSV") {
  const auto csv = polyline_csv(Polyline{{Point{0.0, 1.0}, Point{0.5, 0.25}}});
  CHECK(csv == "x,y\n0,1\n0.5,0.25\n");
}
