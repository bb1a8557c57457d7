#include <catch_amalgamated.hpp>

#include "debranges/potential.hpp"

using namespace debranges;
using Catch::Approx;

TEST_CASE("registry potentials parse and evaluate") {
  const auto z = Potential::from_spec("zero");
  CHECK(z(0.3) == 0.0);
  CHECK(z.mean() == 0.0);

  const auto c = Potential::from_spec("const:5");
  CHECK(c(0.7) == 5.0);
  CHECK(c.mean() == 5.0);
  CHECK(c.bounds().first == 5.0);

  const auto q = Potential::from_spec("cos:10,1");
  CHECK(q(0.0) == Approx(10.0));
  CHECK(q(0.5) == Approx(-10.0));
  CHECK(std::abs(q.mean()) < 1e-14);
  CHECK(q.abs_bound() == Approx(10.0));

  const auto l = Potential::from_spec("linear:-3,6");
  CHECK(l(0.0) == Approx(6.0));
  CHECK(l(1.0) == Approx(3.0));
  CHECK(l.mean() == Approx(4.5));
}

TEST_CASE("malformed specs are configuration errors") {
  CHECK_THROWS_AS(Potential::from_spec("bogus"), ConfigError);
  CHECK_THROWS_AS(Potential::from_spec("const:"), ConfigError);
  CHECK_THROWS_AS(Potential::from_spec("cos:1"), ConfigError);
  CHECK_THROWS_AS(Potential::from_spec("linear:1,x"), ConfigError);
  CHECK_THROWS_AS(Potential::from_spec("const:nan"), ConfigError);
}

TEST_CASE("shift moves values and bounds but not the mean") {
  const auto q = Potential::from_spec("linear:-30,0").with_shift(20.0);
  CHECK(q(1.0) == Approx(-10.0));
  CHECK(q.mean() == Approx(-15.0));
  CHECK(q.total_mean() == Approx(5.0));
  CHECK(q.bounds().first == Approx(-10.0));
  CHECK(q.bounds().second == Approx(20.0));
}

TEST_CASE("grid potentials interpolate and integrate exactly") {
  std::vector<double> s;
  for (int j = 0; j <= 10; ++j) s.push_back(2.0 * j / 10.0 + 1.0);
  const auto lin = Potential::grid(s, 1);
  CHECK(lin(0.35) == Approx(1.7));
  CHECK(lin.mean() == Approx(2.0));
  CHECK(lin.segment_count() == 10);

  std::vector<double> sq;
  for (int j = 0; j <= 20; ++j) sq.push_back(std::pow(j / 20.0, 2));
  const auto cub = Potential::grid(sq, 3);
  // Cubic Hermite with exact interior slopes reproduces t^2 away from the ends.
  CHECK(cub(0.525) == Approx(0.525 * 0.525).epsilon(1e-12));
  CHECK(cub.mean() == Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("piecewise potentials keep their breakpoints") {
  const auto q = Potential::piecewise({{0.0, 0.5, {1.0}}, {0.5, 1.0, {2.0, 4.0}}});
  CHECK(q(0.25) == 1.0);
  CHECK(q(0.75) == Approx(3.0));
  CHECK(q.mean() == Approx(0.5 + 0.5 * 2.0 + 0.5 * 4.0 * 0.25));
  REQUIRE(q.breakpoints().size() == 3);
  CHECK(q.breakpoints()[1] == 0.5);
}

TEST_CASE("json round trip preserves values") {
  for (const auto& q : {Potential::from_spec("cos:10,1").with_shift(1.5), Potential::grid({0.0, 1.0, 4.0, 9.0}, 3),
                        Potential::piecewise({{0.0, 0.3, {1.0, 2.0}}, {0.3, 1.0, {-1.0}}})}) {
    const auto back = Potential::from_json(q.to_json());
    for (double t : {0.0, 0.1, 0.3, 0.55, 0.9, 1.0}) CHECK(back(t) == Approx(q(t)).margin(1e-15));
    CHECK(back.shift() == q.shift());
  }
}
