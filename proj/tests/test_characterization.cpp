#include <catch_amalgamated.hpp>

#include "debranges/characterization.hpp"
#include "debranges/sources.hpp"

using namespace debranges;
using Catch::Approx;

TEST_CASE("free pair has identically zero pairing function") {
  const auto v = check_schrodinger_L2(make_evaluator(Potential::zero()));
  CHECK(v.verdict);
  CHECK(std::abs(v.C_hat) <= 1e-15);
  for (double f : v.f_samples) CHECK(std::abs(f) <= 1e-10);
}

TEST_CASE("closed-form fixture pairing function") {
  const auto ev = Remark5Fixture::evaluator();
  const PairingFunction p{ev, std::nullopt, PairingMode::trig};
  CHECK(pairing_eval(p, pi).real() == Approx(7.0 * pi * pi / 32.0).epsilon(1e-12));
  CHECK(Remark5Fixture::pairing(pi).real() == Approx(7.0 * pi * pi / 32.0).epsilon(1e-12));
  for (cplx z : {cplx(0.4), cplx(3.0), cplx(11.7, 0.0), cplx(2.0, 1.5), cplx(-pi, 0.0)})
    CHECK(std::abs(pairing_eval(p, z) - Remark5Fixture::pairing(z)) <= 1e-12 * std::max(1.0, std::abs(Remark5Fixture::pairing(z))));
  const auto v = check_schrodinger_L2(ev);
  CHECK(v.verdict);
  CHECK(std::abs(v.C_hat) <= 1e-12);
}

TEST_CASE("perturbed zero sequence fails the membership test") {
  const auto v = check_schrodinger_L2(perturbed_fixture());
  CHECK_FALSE(v.verdict);
  REQUIRE(v.shifted_report);
  CHECK_FALSE(v.shifted_report->verdict);
}

TEST_CASE("Schrödinger pairs pass, with C_hat tracking minus half the mean") {
  const auto v = check_schrodinger_L2(make_evaluator(Potential::from_spec("linear:-3,6")));
  CHECK(v.verdict);
  CHECK(v.C_hat == Approx(-2.25).epsilon(1e-5));
  CHECK(v.evenness_defect <= 1e-10);
  CHECK(v.realness_defect <= 1e-10);
  for (auto [y, g] : v.growth) CHECK(g <= 2.0 + 1.0 / y);
}

TEST_CASE("pair mode against the free pair") {
  const auto a = make_evaluator(Potential::from_spec("cos:10,1"));
  const auto b = make_evaluator(Potential::zero());
  CheckOptions opt;
  opt.membership.M = 1000;
  const auto v = check_pair(a, b, opt);
  CHECK(v.verdict);
  CHECK(std::abs(v.C_hat) <= 1e-3);
  const PairingFunction pf{a, std::nullopt, PairingMode::pair};
  CHECK_THROWS_AS(pairing_eval(pf, 1.0), ConfigError);
}

TEST_CASE("closed-form fixture zeros of A and B") {
  CHECK(std::abs(Remark5Fixture::A(0.75 * pi)) <= 1e-15);
  CHECK(std::abs(Remark5Fixture::B(0.5 * pi)) <= 1e-15);
  CHECK(std::abs(Remark5Fixture::A(pi)) > 0.1);
  for (double x = -30.0; x <= 30.0; x += 0.37) CHECK(std::norm(Remark5Fixture::E(x)) > 0.0);
}

TEST_CASE("construction from the zero function gives sin and cos") {
  const auto db = construct_from_f(EvenPWFunction::from_name("zero", 0.0));
  CHECK(db.interlacing_ok);
  for (std::size_t n = 1; n <= db.lambda.size(); ++n) {
    CHECK(db.lambda[n - 1] == Approx(pi * double(n)).epsilon(1e-14));
    CHECK(db.mu[n - 1] == Approx(pi * (double(n) - 0.5)).epsilon(1e-14));
  }
  CHECK(db.roundtrip_sup_error == 0.0);
}

TEST_CASE("construction round trip for a small sinc^2") {
  const auto f = EvenPWFunction::from_name("sinc2", 0.05);
  const auto db = construct_from_f(f);
  CHECK(db.within_threshold);
  CHECK(db.interlacing_ok);
  CHECK(db.roundtrip_sup_error <= 1e-6);
  REQUIRE(db.lambda.size() == 100);
  REQUIRE(db.lambda_equation.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(db.lambda_equation[i] == Approx(db.lambda[i]).epsilon(1e-11));
    CHECK(db.mu_equation[i] == Approx(db.mu[i]).epsilon(1e-11));
    CHECK(std::abs(db.lambda_one_step[i] - db.lambda[i]) <= 0.05 / double(i + 1));
  }
  for (std::size_t i = 0; i + 1 < 100; ++i) {
    CHECK(db.mu[i] < db.lambda[i]);
    CHECK(db.lambda[i] < db.mu[i + 1]);
  }
  CHECK(db.C1 == Approx(db.C2).epsilon(1e-6));
  // (A, B) is Hermite-Biehler: |E(z)| > |E(conj z)| above the axis.
  for (cplx z : {cplx(0.5, 0.5), cplx(7.0, 2.0), cplx(-20.0, 0.1)})
    CHECK(std::abs(db.evaluator->E(z)) > std::abs(db.evaluator->E(std::conj(z))));
}

TEST_CASE("large amplitude breaks interlacing without throwing") {
  const auto db = construct_from_f(EvenPWFunction::from_name("sinc2", 50.0));
  CHECK_FALSE(db.within_threshold);
  CHECK_FALSE(db.interlacing_ok);
  CHECK_FALSE(db.failures.empty());
}

TEST_CASE("unknown test functions are configuration errors") {
  CHECK_THROWS_AS(EvenPWFunction::from_name("gauss", 1.0), ConfigError);
  ConstructOptions opt;
  opt.zero_count = 5000;
  CHECK_THROWS_AS(construct_from_f(EvenPWFunction::from_name("zero", 0.0), opt), ConfigError);
}

TEST_CASE("pair mode is antisymmetric under swapping the pairs") {
  const auto a = make_evaluator(Potential::from_spec("linear:-3,6"));
  const auto b = Remark5Fixture::evaluator();
  const PairingFunction ab{a, b, PairingMode::pair};
  const PairingFunction ba{b, a, PairingMode::pair};
  for (cplx z : {cplx(0.9), cplx(4.4, 0.0), cplx(13.0, 1.0)}) CHECK(pairing_eval(ab, z) == -pairing_eval(ba, z));
}

TEST_CASE("constructed pair passes the membership test") {
  const auto db = construct_from_f(EvenPWFunction::from_name("sinc4", 0.03));
  REQUIRE(db.interlacing_ok);
  CheckOptions opt;
  opt.membership.M = 1000;
  const auto v = check_schrodinger_L2(*db.evaluator, opt);
  CHECK(v.verdict);
  CHECK(v.C_hat == Approx(-db.f0).margin(1e-6));
  CHECK(db.roundtrip_sup_error <= 1e-6);
}
