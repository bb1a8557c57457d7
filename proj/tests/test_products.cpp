#include <catch_amalgamated.hpp>

#include <random>

#include "debranges/products.hpp"

using namespace debranges;
using Catch::Approx;

TEST_CASE("lattice products are sin and cos") {
  const CanonicalProduct s(ZeroSequence::lattice(Parity::sine, 40), 1.0);
  const CanonicalProduct c(ZeroSequence::lattice(Parity::cosine, 40), 1.0);
  CHECK(s.leading_constant() == Approx(1.0).epsilon(1e-14));
  for (cplx z : {cplx(0.3, 0.0), cplx(17.2, 0.5), cplx(130.0, -3.0), cplx(-2.0, 40.0), cplx(3.1, 0.0)}) {
    CHECK(std::abs(s.eval(z) - std::sin(z)) <= 1e-11 * std::abs(std::sin(z)));
    CHECK(std::abs(c.eval(z) - std::cos(z)) <= 1e-11 * std::abs(std::cos(z)));
  }
  CHECK(std::abs(s.ratio_to_trig({7.0, 1.0}) - 1.0) <= 1e-12);
  for (std::size_t n = 1; n <= 40; ++n) CHECK(s.derivative_at_zero(n) == Approx(sign_of_parity(long(n))).epsilon(1e-12));
}

TEST_CASE("shifted lattice products have closed forms") {
  // nu_n^2 = l_n^2 + c for all n gives z sin(s)/s and cos(s), s = sqrt(z^2 - c).
  const double c = 5.0;
  std::vector<double> lam, mu;
  for (int n = 1; n <= 30; ++n) {
    lam.push_back(std::sqrt(pi * pi * n * n + c));
    mu.push_back(std::sqrt(pi * pi * (n - 0.5) * (n - 0.5) + c));
  }
  const double sc = std::sqrt(c);
  const CanonicalProduct A(ZeroSequence(lam, Parity::sine, c), std::sinh(sc) / sc);
  const CanonicalProduct B(ZeroSequence(mu, Parity::cosine, c), std::cosh(sc));
  for (cplx z : {cplx(1.0, 0.2), cplx(31.0, -2.0), cplx(250.0, 0.0), cplx(0.0, 15.0)}) {
    const cplx s = std::sqrt(z * z - c);
    CHECK(std::abs(A.eval(z) - z * std::sin(s) / s) <= 1e-11 * std::abs(z * std::sin(s) / s));
    CHECK(std::abs(B.eval(z) - std::cos(s)) <= 1e-11 * std::abs(std::cos(s)));
  }
  CHECK(A.leading_constant() == Approx(1.0).epsilon(1e-12));
  CHECK(B.leading_constant() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("products are odd or even") {
  const CanonicalProduct s(ZeroSequence({2.9, 6.5, 9.3}, Parity::sine, 0.4), 2.0);
  const CanonicalProduct c(ZeroSequence({1.4, 4.9, 8.0}, Parity::cosine, -0.3), 0.7);
  for (cplx z : {cplx(1.1, 0.4), cplx(20.0, -1.0)}) {
    CHECK(std::abs(s.eval(-z) + s.eval(z)) <= 1e-12 * std::abs(s.eval(z)));
    CHECK(std::abs(c.eval(-z) - c.eval(z)) <= 1e-12 * std::abs(c.eval(z)));
  }
  CHECK(std::abs(s.eval(6.5)) <= 1e-12);
  CHECK(std::abs(c.eval(4.9)) <= 1e-12);
}

TEST_CASE("q-backed products reproduce the shooting pair") {
  for (const char* spec : {"const:5", "cos:10,1", "linear:-3,6"}) {
    const Shooter sh(positivity_shift(Potential::from_spec(spec)));
    const auto qp = q_backed_products(sh, 60);
    CHECK(qp.A->leading_constant() == Approx(qp.B->leading_constant()).epsilon(1e-4));
    for (cplx z : {cplx(2.0, 0.5), cplx(9.0, -1.0), cplx(15.0, 0.0)}) {
      const auto ab = sh.ab(z);
      CHECK(std::abs(qp.A->eval(z) - ab.A) <= 1e-4 * std::abs(ab.A));
      CHECK(std::abs(qp.B->eval(z) - ab.B) <= 1e-4 * std::abs(ab.B));
    }
  }
}

TEST_CASE("ratio to the trigonometric function stays bounded off the real line") {
  const Shooter sh(Potential::from_spec("cos:10,1"));
  const auto qp = q_backed_products(sh, 40);
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -100.0 + 0.5 * i;
    for (double y : {-1.0, 1.0}) {
      worst = std::max(worst, qp.A->trig_bound_ratio({x, y}));
      worst = std::max(worst, qp.B->trig_bound_ratio({x, y}));
    }
  }
  CHECK(worst <= 10.0);
}

TEST_CASE("imaginary-axis slope tends to half the tail constant") {
  const Shooter sh(Potential::from_spec("const:5"));
  const auto qp = q_backed_products(sh, 30);
  const auto r = imaginary_axis_slope(*qp.A, {25.0, 50.0, 100.0});
  REQUIRE(r.richardson.size() == 2);
  for (double v : r.richardson) CHECK(v == Approx(2.5).epsilon(0.01));
  // Closed form y (y sinh r / (r sinh y) - 1), r = sqrt(y^2 + 5).
  for (std::size_t i = 0; i < r.y.size(); ++i) {
    const double y = r.y[i];
    const double rr = std::sqrt(y * y + 5.0);
    CHECK(r.L[i] == Approx(y * (y / rr * std::exp(rr - y) - 1.0)).epsilon(1e-6));
  }
}

TEST_CASE("derivatives at zeros and cross values follow the sign patterns") {
  const Shooter sh(Potential::from_spec("linear:-3,6"));
  const auto qp = q_backed_products(sh, 40);
  const auto ra = value_and_derivative_at_zeros(*qp.A, *qp.B);
  const auto rb = value_and_derivative_at_zeros(*qp.B, *qp.A);
  CHECK(std::abs(ra.derivative_dev.back()) < 0.05);
  CHECK(std::abs(rb.cross_dev.back()) < 0.05);
  // The deviations are square summable: small share in the last quarter.
  CHECK(ZeroValueReport::last_quarter_share(ra.derivative_l2) < 0.1);
  CHECK(ZeroValueReport::last_quarter_share(rb.cross_l2) < 0.1);
  // Against the shooting pair: A'(lambda_n) by a central difference.
  const double lam = qp.A->zeros().positive()[4];
  const double h = 1e-5;
  const double fd = ((sh.ab(lam + h).A - sh.ab(lam - h).A) / (2 * h)).real();
  CHECK(ra.derivative[4] == Approx(fd).epsilon(1e-6));
}

TEST_CASE("zero sequences validate and round-trip") {
  CHECK_THROWS_AS(ZeroSequence({1.0, 0.5}, Parity::sine), ConfigError);
  CHECK_THROWS_AS(ZeroSequence({-1.0}, Parity::sine), ConfigError);
  CHECK_THROWS_AS(ZeroSequence({1.0}, Parity::cosine, -100.0), ConfigError);
  CHECK_THROWS_AS(CanonicalProduct(ZeroSequence::lattice(Parity::sine, 3), 0.0), ConfigError);
  const ZeroSequence z({3.0, 6.4}, Parity::sine, 1.25);
  const auto back = ZeroSequence::from_json(z.to_json());
  CHECK(back.positive() == z.positive());
  CHECK(back.c_tail() == z.c_tail());
  CHECK(back.parity() == Parity::sine);
  CHECK(z.symmetric() == std::vector<double>{-6.4, -3.0, 0.0, 3.0, 6.4});
  CHECK_THROWS_AS(ZeroSequence::from_json(nlohmann::json{{"parity", "odd"}, {"entries", {1.0}}}), ConfigError);
}

TEST_CASE("ratio and product agree at random off-lattice points") {
  const Shooter sh(Potential::from_spec("cos:10,1"));
  const auto qp = q_backed_products(sh, 40);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ux(-150.0, 150.0), uy(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const cplx z(ux(rng), uy(rng));
    const cplx a = qp.A->eval(z) / std::sin(z);
    const cplx b = qp.B->eval(z) / std::cos(z);
    CHECK(std::abs(qp.A->ratio_to_trig(z) - a) <= 1e-10 * std::abs(a));
    CHECK(std::abs(qp.B->ratio_to_trig(z) - b) <= 1e-10 * std::abs(b));
  }
}

TEST_CASE("symmetric product agrees with ordered partial products") {
  const ZeroSequence zs({2.8, 6.6, 9.1, 12.7}, Parity::sine, 0.8);
  const CanonicalProduct p(zs, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int i = 0; i < 20; ++i) {
    const cplx z(u(rng), 0.3 * u(rng));
    cplx partial = z;
    const long n_max = 200000;
    for (long n = 1; n <= n_max; ++n) {
      const double nu = zs.value(n);
      partial *= 1.0 - z * z / (nu * nu);
    }
    CHECK(std::abs(partial - p.eval(z)) <= 1e-4 * std::max(1.0, std::abs(p.eval(z))));
  }
}
