#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "faultscout/geometry.hpp"

using namespace faultscout;

TEST_CASE("make_triplet normalises class order", "[core]") {
  LabeledPoint<2> a{{0.0, 0.0}, 1};
  LabeledPoint<2> b{{0.001, 0.0}, 2};

  auto t = make_triplet(a, b, 0.001);
  CHECK(t.class_i == 1);
  CHECK(t.class_j == 2);
  CHECK(t.mid()[0] == Catch::Approx(0.0005));
  CHECK(t.mid()[1] == 0.0);

  // swapping the arguments yields the same triplet
  auto t2 = make_triplet(b, a, 0.001);
  CHECK(t2.class_i == t.class_i);
  CHECK(t2.class_j == t.class_j);
  CHECK(t2.point_i == t.point_i);
  CHECK(t2.point_j == t.point_j);
}

TEST_CASE("make_triplet rejects invalid input", "[core]") {
  LabeledPoint<2> a{{0.0, 0.0}, 1};
  LabeledPoint<2> same{{0.001, 0.0}, 1};
  LabeledPoint<2> far{{0.1, 0.0}, 2};

  CHECK_THROWS_AS(make_triplet(a, same, 0.001), std::invalid_argument);
  CHECK_THROWS_AS(make_triplet(a, far, 0.001), std::invalid_argument);
}

TEST_CASE("make_triplet order invariance on random input", "[core]") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    Vec2 p(u(rng), u(rng));
    Vec2 q = p + 0.001 * Vec2(u(rng), u(rng));
    int ca = 1 + (k % 4), cb = 1 + ((k + 1 + k / 4) % 4);
    if (ca == cb) continue;
    LabeledPoint<2> a{p, ca}, b{q, cb};
    auto t1 = make_triplet(a, b, 0.001);
    auto t2 = make_triplet(b, a, 0.001);
    REQUIRE(t1.class_i == t2.class_i);
    REQUIRE(t1.class_j == t2.class_j);
    REQUIRE(t1.point_i == t2.point_i);
    REQUIRE(t1.class_i < t1.class_j);
  }
}

TEST_CASE("BoxDomain invariants and queries", "[core]") {
  CHECK_THROWS_AS(BoxDomain<2>(Vec2(1, 0), Vec2(0, 1)), std::invalid_argument);

  BoxDomain<2> box(Vec2(0, 0), Vec2(1, 1));
  CHECK(box.contains(Vec2(0.5, 0.5)));
  CHECK(box.contains(Vec2(0.0, 1.0)));
  CHECK_FALSE(box.contains(Vec2(-0.1, 0.5)));
  CHECK(box.boundary_distance(Vec2(0.5, 0.5)) == Catch::Approx(0.5));
  CHECK(box.boundary_distance(Vec2(0.1, 0.5)) == Catch::Approx(0.1));
}

TEST_CASE("FaultSet component bookkeeping", "[core]") {
  FaultSet<2> fs;
  fs.class_i = 1;
  fs.class_j = 2;
  for (int k = 0; k < 4; ++k) {
    Triplet<2> t;
    t.point_i = Vec2(0.1 * k, 0.0);
    t.point_j = Vec2(0.1 * k, 0.001);
    t.class_i = 1;
    t.class_j = 2;
    fs.triplets.push_back(t);
  }
  fs.reset_components();
  CHECK(fs.component_count() == 1);
  CHECK(fs.component_begin(0) == 0);
  CHECK(fs.component_end(0) == 4);

  fs.component_breaks = {2};
  fs.component_closed = {false, false};
  CHECK(fs.component_count() == 2);
  CHECK(fs.component_begin(1) == 2);
  CHECK(fs.component_end(0) == 2);
  CHECK(fs.component_end(1) == 4);
}

TEST_CASE("Params validation", "[core]") {
  Params p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.beta_angle == Catch::Approx(std::acos(-0.9)));

  Params bad = p;
  bad.eps_coarse = bad.eps_err * 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  Params bad2 = p;
  bad2.eps_safemax = 1.5;
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}
