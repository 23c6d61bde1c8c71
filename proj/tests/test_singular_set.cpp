#include <cmath>
#include <random>

#include "doctest.h"
#include "grushin/singular_set.hpp"

using namespace grushin;

namespace {

SingularSet v_axis() { return SingularSet::coordinate_plane(2, 0); }

SingularSet unit_segment() {
  return SingularSet(2, {shape::Segment{Point{0.0, 0.0}, Point{1.0, 0.0}}});
}

// Dense sampling of a segment, independent of the projection formula.
double sampled_segment_distance(const Point& p, const Point& a, const Point& b, int n) {
  double best = 1e300;
  for (int i = 0; i <= n; ++i) best = std::min(best, dist(p, lerp(a, b, double(i) / n)));
  return best;
}

}  // namespace

TEST_CASE("euclid_distance examples") {
  CHECK(euclid_distance(Point{1.0, 0.0}, SingularSet::point(Point{0.0, 0.0})) == 1.0);
  CHECK(euclid_distance(Point{3.0, 4.0}, v_axis()) == 3.0);
  const double d = euclid_distance(Point{2.0, 2.0}, unit_segment());
  CHECK(d == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(d == doctest::Approx(sampled_segment_distance(Point{2.0, 2.0}, Point{0.0, 0.0},
                                                      Point{1.0, 0.0}, 100000))
                 .epsilon(1e-9));
}

TEST_CASE("nearest_point examples") {
  CHECK(nearest_point(Point{1.0, 0.0}, SingularSet::point(Point{0.0, 0.0})) == Point{0.0, 0.0});
  CHECK(nearest_point(Point{3.0, 4.0}, v_axis()) == Point{0.0, 4.0});
  CHECK(nearest_point(Point{2.0, 2.0}, unit_segment()) == Point{1.0, 0.0});
}

TEST_CASE("nearest_point tie-breaking") {
  // Two cloud points equidistant: lexicographically smallest wins.
  SingularSet cloud(2, {shape::Cloud{{Point{1.0, 1.0}, Point{-1.0, 1.0}}}});
  CHECK(nearest_point(Point{0.0, 0.0}, cloud) == Point{-1.0, 1.0});
  // Two primitives equidistant: first in list order wins.
  SingularSet two(2, {shape::PointShape{Point{1.0, 0.0}}, shape::PointShape{Point{-1.0, 0.0}}});
  CHECK(nearest_point(Point{0.0, 0.0}, two) == Point{1.0, 0.0});
}

TEST_CASE("primitive kinds") {
  SingularSet half(2, {shape::HalfLine{Point{0.0, 0.0}, Point{-1.0, 0.0}}});
  CHECK(half.distance(Point{2.0, 0.0}) == 2.0);
  CHECK(half.distance(Point{-5.0, 3.0}) == 3.0);
  SingularSet box(2, {shape::Box{Point{0.0, 0.0}, Point{1.0, 1.0}}});
  CHECK(box.distance(Point{0.5, 0.5}) == 0.0);
  CHECK(box.distance(Point{4.0, 5.0}) == doctest::Approx(5.0));
  SingularSet plane3 = SingularSet::coordinate_plane(3, 2, 1.0);
  CHECK(plane3.distance(Point{7.0, -2.0, 4.0}) == 3.0);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(euclid_distance(Point{1.0, 2.0, 3.0}, v_axis()), DimensionError);
  CHECK_THROWS_AS(SingularSet(2, {}), PreconditionError);
  CHECK_THROWS_AS(SingularSet(2, {shape::PointShape{Point{1.0, 2.0, 3.0}}}), DimensionError);
}

TEST_CASE("segment contact") {
  auto y = v_axis();
  auto c = y.contact(Point{-1.0, 0.0}, Point{3.0, 0.0});
  REQUIRE(c.hits.size() == 1);
  CHECK(c.hits[0] == doctest::Approx(0.25));
  CHECK_FALSE(c.overlaps);
  CHECK(y.contact(Point{0.0, 0.0}, Point{0.0, 2.0}).overlaps);
  CHECK(y.contact(Point{1.0, 0.0}, Point{2.0, 0.0}).hits.empty());
  auto seg = unit_segment();
  auto c2 = seg.contact(Point{0.5, -1.0}, Point{0.5, 1.0});
  REQUIRE(c2.hits.size() == 1);
  CHECK(c2.hits[0] == doctest::Approx(0.5));
  CHECK(seg.contact(Point{0.5, 0.0}, Point{2.0, 0.0}).overlaps);
  auto pt = SingularSet::point(Point{0.0, 0.0});
  auto c3 = pt.contact(Point{-1.0, -1.0}, Point{1.0, 1.0});
  REQUIRE(c3.hits.size() == 1);
  CHECK(c3.hits[0] == doctest::Approx(0.5));
}

TEST_CASE("properties: 1-Lipschitz, nearest on Y, monotone under inclusion") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const SingularSet base(2, {shape::Segment{Point{-1.0, 0.5}, Point{1.0, -0.5}},
                             shape::PointShape{Point{2.0, 2.0}}});
  const SingularSet bigger = base.with(shape::HalfLine{Point{0.0, -2.0}, Point{1.0, 1.0}});
  for (int i = 0; i < 500; ++i) {
    Point p{u(rng), u(rng)};
    Point q{u(rng), u(rng)};
    CHECK(std::abs(base.distance(p) - base.distance(q)) <= dist(p, q) + 1e-12);
    CHECK(base.distance(base.nearest(p)) <= 1e-12);
    CHECK(dist(p, base.nearest(p)) == doctest::Approx(base.distance(p)));
    CHECK(bigger.distance(p) <= base.distance(p));
  }
}
