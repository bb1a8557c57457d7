#pragma once

// Pairing functions z(A cos z - B sin z) and z(A B~ - A~ B), the Const + L2
// membership checks built on them, and the construction of (A, B) from a
// small even Paley-Wiener function.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "debranges/core.hpp"
#include "debranges/paley_wiener.hpp"
#include "debranges/products.hpp"
#include "debranges/schrodinger.hpp"

namespace debranges {

enum class PairingMode { trig, pair };

struct PairingFunction {
  DeBrangesEvaluator source;
  std::optional<DeBrangesEvaluator> reference;  ///< required in pair mode
  PairingMode mode = PairingMode::trig;
};

inline cplx pairing_eval(const PairingFunction& p, cplx z) {
  if (z == cplx(0.0)) return 0.0;
  const auto s = p.source(z);
  if (p.mode == PairingMode::trig) return z * (s.A * std::cos(z) - s.B * std::sin(z));
  if (!p.reference) throw ConfigError("pairing_eval: pair mode needs a reference");
  const auto r = (*p.reference)(z);
  return z * (s.A * r.B - r.A * s.B);
}

struct CheckOptions {
  MembershipOptions membership;
  bool shifted_lattice = true;   ///< also test the lattice pi/4 + (pi/2) Z
  double symmetry_tol = 1e-6;    ///< evenness / realness tolerance, relative to max |F|
  std::vector<double> growth_heights{10.0, 20.0, 40.0};
};

struct Verdict {
  bool verdict = false;
  MembershipReport report;
  std::optional<MembershipReport> shifted_report;
  double C_hat = 0.0;
  std::vector<double> f_samples;  ///< F(pi m/2) - C_hat, m = -M..M
  double evenness_defect = 0.0;
  double realness_defect = 0.0;
  std::vector<std::pair<double, double>> growth;  ///< (y, log|F(iy)|/y)

  nlohmann::json to_json() const {
    nlohmann::json j{{"verdict", verdict},
                     {"C_hat", C_hat},
                     {"report", report.to_json()},
                     {"evenness_defect", evenness_defect},
                     {"realness_defect", realness_defect}};
    if (shifted_report) j["shifted_report"] = shifted_report->to_json();
    j["growth"] = nlohmann::json::array();
    for (auto [y, g] : growth) j["growth"].push_back({{"y", y}, {"log_abs_over_y", g}});
    return j;
  }
};

namespace detail {

inline Verdict run_check(const PairingFunction& p, const CheckOptions& opt) {
  Verdict v;
  double max_imag = 0.0;
  double max_abs = 0.0;
  auto F = [&](double x) {
    const cplx f = pairing_eval(p, x);
    max_imag = std::max(max_imag, std::abs(f.imag()));
    max_abs = std::max(max_abs, std::abs(f));
    return f.real();
  };
  v.report = pw_membership_test(F, 2.0, opt.membership, 0.0);
  v.C_hat = v.report.C_hat;
  const long M = v.report.M;
  double even = 0.0;
  for (long m = 1; m <= M; ++m)
    even = std::max(even, std::abs(v.report.samples[std::size_t(M + m)] - v.report.samples[std::size_t(M - m)]));
  const double scale = std::max(1.0, max_abs);
  v.evenness_defect = even / scale;
  for (double s : v.report.samples) v.f_samples.push_back(s - v.C_hat);
  bool ok = v.report.verdict;
  if (opt.shifted_lattice) {
    v.shifted_report = pw_membership_test(F, 2.0, opt.membership, pi / 4.0);
    ok = ok && v.shifted_report->verdict;
  }
  v.realness_defect = max_imag / std::max(1.0, max_abs);
  for (double y : opt.growth_heights) {
    const double a = std::abs(pairing_eval(p, cplx(0.0, y)));
    v.growth.emplace_back(y, a > 0 ? std::log(a) / y : -std::numeric_limits<double>::infinity());
  }
  v.verdict = ok && v.evenness_defect <= opt.symmetry_tol && v.realness_defect <= opt.symmetry_tol;
  return v;
}

}  // namespace detail

/// Tests that z(A cos z - B sin z) lies in Const + L2 on the real line by
/// lattice sampling (type 2). The verdict is a diagnostic, not a proof;
/// exponential type and Cartwright class are assumed, not verified.
inline Verdict check_schrodinger_L2(const DeBrangesEvaluator& source, const CheckOptions& opt = {}) {
  return detail::run_check(PairingFunction{source, std::nullopt, PairingMode::trig}, opt);
}

/// Same test on z(A B~ - A~ B) against a reference pair.
inline Verdict check_pair(const DeBrangesEvaluator& source, const DeBrangesEvaluator& reference,
                          const CheckOptions& opt = {}) {
  return detail::run_check(PairingFunction{source, reference, PairingMode::pair}, opt);
}

/// Even real function of exponential type at most 2 with named closed form.
struct EvenPWFunction {
  std::string name;
  double amp = 0.0;
  std::function<cplx(cplx)> f;
  std::optional<double> derivative_at_zero;  ///< exact f'(0) when known

  static EvenPWFunction from_name(const std::string& name, double amp) {
    if (!std::isfinite(amp)) throw ConfigError("construct: amplitude must be finite");
    EvenPWFunction e;
    e.name = name;
    e.amp = amp;
    e.derivative_at_zero = 0.0;
    if (name == "zero") {
      e.f = [](cplx) { return cplx(0.0); };
    } else if (name == "sinc2") {
      e.f = [amp](cplx z) {
        const cplx s = sinc(z);
        return amp * s * s;
      };
    } else if (name == "sinc") {
      e.f = [amp](cplx z) { return amp * sinc(2.0 * z); };
    } else if (name == "sinc4") {
      e.f = [amp](cplx z) {
        const cplx s = sinc(0.5 * z);
        return amp * s * s * s * s;
      };
    } else {
      throw ConfigError("unknown test function '" + name + "' (expected zero, sinc, sinc2, sinc4)");
    }
    return e;
  }

  double operator()(double x) const { return f(x).real(); }

  double derivative0() const {
    if (derivative_at_zero) return *derivative_at_zero;
    const double h = 1e-3;
    return (8.0 * ((*this)(h) - (*this)(-h)) - ((*this)(2 * h) - (*this)(-2 * h))) / (12.0 * h);
  }

  /// sqrt((pi/2) sum f(pi m/2)^2), the PW2 norm via its critical lattice.
  double lattice_norm(long M = 2000) const {
    return plancherel_norm(sample_function([this](double x) { return (*this)(x); }, 2.0, M));
  }
};

/// 1 + sum_{|k|<=K} d_k / (x - t_k) + c sum_{|k|>K} 1/(t_k (x - t_k)) over the
/// lattice t_k = pi k (sine) or pi k + pi/2 (cosine); its zeros are the zeros
/// of sin + g or cos + h.
struct ZeroEquation {
  Parity parity = Parity::sine;
  long K = 0;
  std::vector<double> nodes;         ///< t_k in increasing order
  std::vector<double> coefficients;  ///< d_k
  double tail_c = 0.0;

  double node(long k) const { return parity == Parity::sine ? pi * double(k) : pi * double(k) + 0.5 * pi; }

  /// Closed-form tail at x. The lattice is summed in symmetric pairs,
  /// S(x) = sum over pairs of 1/(x^2 - t^2), which is -(1/x - cot x)/(2x)
  /// (sine) or -tan(x)/(2x) (cosine). With `skip` set, the pair of node
  /// `skip` is removed analytically so that the result is smooth there.
  double tail(double x, std::optional<long> skip = std::nullopt) const {
    if (tail_c == 0.0) return 0.0;
    const bool sine = parity == Parity::sine;
    const double xa = std::abs(x);
    long removed = -1;
    double full;
    if (skip && !(sine && *skip == 0)) {
      removed = sine ? std::abs(*skip) : (*skip >= 0 ? *skip : -*skip - 1);
      const double t = std::abs(node(*skip));
      const double d = xa - t;
      full = -cot_regular(d).real() / (2.0 * xa) - 1.0 / (2.0 * xa * (xa + t));
      if (sine) full -= 1.0 / (2.0 * xa * xa);
    } else if (sine) {
      full = xa < 1e-8 ? -1.0 / 6.0 : -cot_regular(x).real() / (2.0 * x);
    } else {
      full = xa < 1e-8 ? -0.5 : -std::tan(x) / (2.0 * x);
    }
    double explicit_sum = 0.0;
    const long first = sine ? 1 : 0;
    const long last = sine ? K : K - 1;
    for (long j = first; j <= last; ++j) {
      if (j == removed) continue;
      const double t = node(j);
      explicit_sum += 1.0 / (x * x - t * t);
    }
    return 2.0 * tail_c * (full - explicit_sum);
  }

  double value(double x) const {
    double acc = 1.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += coefficients[i] / (x - nodes[i]);
    return acc + tail(x);
  }

  /// (x - t_n) * value(x), smooth near t_n.
  double regularized(double x, long n) const {
    const std::size_t idx = index_of(n);
    double acc = 1.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (i != idx) acc += coefficients[i] / (x - nodes[i]);
    acc += tail(x, n);
    return (x - nodes[idx]) * acc + coefficients[idx];
  }

  /// t_n - d_n / (1 + sum_{k != n} d_k / (t_n - t_k) + tail(t_n)).
  double one_step(long n) const {
    const std::size_t idx = index_of(n);
    const double t = nodes[idx];
    double acc = 1.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (i != idx) acc += coefficients[i] / (t - nodes[i]);
    acc += tail(t, n);
    return t - coefficients[idx] / acc;
  }

  std::size_t index_of(long n) const {
    const long idx = n + K;
    if (idx < 0 || idx >= static_cast<long>(nodes.size())) throw ConfigError("ZeroEquation: index outside computed range");
    return static_cast<std::size_t>(idx);
  }
};

/// The unique root of the zero equation in (t_n - delta, t_n + delta).
inline double perturbed_zero_solve(const ZeroEquation& eq, long n, double delta = pi / 3.0, double rel_tol = 1e-15) {
  const double t = eq.node(n);
  auto G = [&](double x) { return eq.regularized(x, n); };
  const double a = t - delta;
  const double b = t + delta;
  const double ga = G(a);
  const double gb = G(b);
  if ((ga > 0) == (gb > 0) && ga != 0.0 && gb != 0.0)
    throw NumericalError("perturbed_zero_solve: no sign change around node " + std::to_string(n));
  return bracketed_root(G, a, b, ga, gb, rel_tol);
}

struct ConstructOptions {
  long M = 2000;              ///< cardinal series window for g and h
  long zero_count = 100;      ///< zeros computed for n = 1..zero_count
  double norm_threshold = 0.1;
  double delta = pi / 3.0;    ///< half-width of the zero brackets
  long compare_points = 400;  ///< round-trip grid on [-compare_range, compare_range]
  double compare_range = 50.0;
};

/// (A, B) = (sin + g, cos + h) built from an even real f in PW2.
struct ConstructedDB {
  std::function<cplx(cplx)> g;
  std::function<cplx(cplx)> h;
  std::shared_ptr<const DeBrangesEvaluator> evaluator;
  std::vector<double> lambda;  ///< positive zeros of A, n = 1..zero_count
  std::vector<double> mu;      ///< positive zeros of B, n = 1..zero_count
  std::vector<double> lambda_one_step;
  std::vector<double> lambda_equation;  ///< roots of the zero equation, for cross-checking
  std::vector<double> mu_equation;
  bool interlacing_ok = false;
  bool within_threshold = false;
  double f_norm = 0.0;
  double f0 = 0.0;
  double fprime0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double roundtrip_sup_error = 0.0;
  std::vector<std::string> failures;
  ZeroEquation eq_A;
  ZeroEquation eq_B;

  nlohmann::json to_json() const {
    return {{"interlacing_ok", interlacing_ok},
            {"within_threshold", within_threshold},
            {"f_norm", f_norm},
            {"f0", f0},
            {"fprime0", fprime0},
            {"C1", C1},
            {"C2", C2},
            {"roundtrip_sup_error", roundtrip_sup_error},
            {"lambda", lambda},
            {"mu", mu},
            {"failures", failures}};
  }
};

namespace detail {

/// Root of F near `seed` inside (seed - delta, seed + delta): Newton with a
/// bisection safeguard on a sign-change bracket.
inline std::optional<double> safeguarded_newton(const std::function<double(double)>& F, double seed, double delta) {
  double a = seed - delta;
  double b = seed + delta;
  double fa = F(a);
  double fb = F(b);
  if ((fa > 0) == (fb > 0)) return std::nullopt;
  double x = seed;
  for (int it = 0; it < 100; ++it) {
    const double fx = F(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    const double h = 1e-7 * std::max(1.0, std::abs(x));
    const double dfx = (F(x + h) - F(x - h)) / (2.0 * h);
    double nx = dfx != 0.0 ? x - fx / dfx : 0.5 * (a + b);
    if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
    if (std::abs(nx - x) <= 1e-15 * std::max(1.0, std::abs(x)) || b - a <= 4e-16 * std::max(1.0, std::abs(x))) return nx;
    x = nx;
  }
  return x;
}

}  // namespace detail

/// Builds g, h in PW1 with g(0) = f'(0), g(pi n) = (-1)^n (f(pi n) - f(0))/(pi n),
/// h(pi n + pi/2) = (-1)^(n+1) (f(pi n + pi/2) - f(0))/(pi n + pi/2), sets
/// A = sin + g, B = cos + h, and locates the zeros of A and B next to their
/// lattices. The constant f(0) enters g and h through the closed forms
/// f(0)(sin z - z cos z)/z^2 and f(0) sin z / z, which carry the slowly
/// decaying part of the samples exactly.
inline ConstructedDB construct_from_f(const EvenPWFunction& f, const ConstructOptions& opt = {}) {
  if (opt.M < 10 || opt.zero_count < 1 || opt.zero_count > opt.M / 2)
    throw ConfigError("construct_from_f: need M >= 10 and 1 <= zero_count <= M/2");
  ConstructedDB db;
  const double f0 = f(0.0);
  const double fp0 = f.derivative0();
  db.f0 = f0;
  db.fprime0 = fp0;
  db.f_norm = f.lattice_norm(opt.M);
  db.within_threshold = db.f_norm <= opt.norm_threshold;

  auto g_samples = std::make_shared<BandlimitedSamples>(sample_function(
      [&](double x) { return x == 0.0 ? fp0 : sign_of_parity(std::lround(x / pi)) * f(x) / x; }, 1.0, opt.M, 0.0));
  auto h_samples = std::make_shared<BandlimitedSamples>(sample_function(
      [&](double x) { return -sign_of_parity(std::lround((x - 0.5 * pi) / pi)) * f(x) / x; }, 1.0, opt.M, 0.5 * pi));
  db.g = [g_samples, f0](cplx z) {
    const cplx base = std::abs(z) < 1e-3 ? z / 3.0 - z * z * z / 30.0 : (std::sin(z) - z * std::cos(z)) / (z * z);
    return f0 * base + cardinal_eval(*g_samples, z).value;
  };
  db.h = [h_samples, f0](cplx z) { return f0 * sinc(z) + cardinal_eval(*h_samples, z).value; };
  auto g = db.g;
  auto h = db.h;
  db.evaluator = std::make_shared<const DeBrangesEvaluator>(
      [g, h](cplx z) { return ABValue{std::sin(z) + g(z), std::cos(z) + h(z)}; }, "constructed:" + f.name);

  // Zero equations on the lattices, used to cross-check the direct roots.
  const long K = opt.M;
  db.eq_A.parity = Parity::sine;
  db.eq_A.K = K;
  db.eq_A.tail_c = -f0;
  for (long k = -K; k <= K; ++k) {
    const double t = pi * double(k);
    db.eq_A.nodes.push_back(t);
    db.eq_A.coefficients.push_back(k == 0 ? fp0 : (f(t) - f0) / t);
  }
  db.eq_B.parity = Parity::cosine;
  db.eq_B.K = K;
  db.eq_B.tail_c = -f0;
  for (long k = -K; k < K; ++k) {
    const double t = pi * double(k) + 0.5 * pi;
    db.eq_B.nodes.push_back(t);
    db.eq_B.coefficients.push_back((f(t) - f0) / t);
  }

  auto A = [&](double x) { return std::sin(x) + g(x).real(); };
  auto B = [&](double x) { return std::cos(x) + h(x).real(); };
  bool ok = true;
  for (long n = 1; n <= opt.zero_count; ++n) {
    const double tl = pi * double(n);
    const double tm = pi * (double(n) - 0.5);
    const auto l = detail::safeguarded_newton(A, tl, opt.delta);
    const auto m = detail::safeguarded_newton(B, tm, opt.delta);
    if (!l || !m) {
      ok = false;
      db.failures.push_back("no isolated zero near index " + std::to_string(n));
      break;
    }
    db.lambda.push_back(*l);
    db.mu.push_back(*m);
    if (std::abs(*l - tl) >= 0.5 || std::abs(*m - tm) >= 0.5) {
      ok = false;
      db.failures.push_back("zero outside its half-window at index " + std::to_string(n));
    }
    try {
      db.lambda_equation.push_back(perturbed_zero_solve(db.eq_A, n, opt.delta));
      db.mu_equation.push_back(perturbed_zero_solve(db.eq_B, n - 1, opt.delta));
      db.lambda_one_step.push_back(db.eq_A.one_step(n));
    } catch (const NumericalError& e) {
      db.failures.push_back(e.what());
    }
  }
  // Zero of A at the origin: A(0) = f'(0), which vanishes for even f.
  if (std::abs(A(0.0)) > 1e-12) {
    ok = false;
    db.failures.push_back("A(0) does not vanish");
  }
  db.interlacing_ok = ok;

  if (ok) {
    const long N = static_cast<long>(db.lambda.size());
    std::vector<double> tail_vals;
    for (long n = N / 2 + 1; n <= N; ++n) {
      tail_vals.push_back(db.lambda[n - 1] * db.lambda[n - 1] - pi * pi * double(n * n));
      tail_vals.push_back(db.mu[n - 1] * db.mu[n - 1] - pi * pi * (double(n) - 0.5) * (double(n) - 0.5));
    }
    const double c_tail = median(tail_vals);
    const double h0 = 1e-4;
    const double KA = (8.0 * (A(h0) - A(-h0)) - (A(2 * h0) - A(-2 * h0))) / (12.0 * h0);
    try {
      db.C1 = CanonicalProduct(ZeroSequence(db.lambda, Parity::sine, c_tail), KA).leading_constant();
      db.C2 = CanonicalProduct(ZeroSequence(db.mu, Parity::cosine, c_tail), B(0.0)).leading_constant();
    } catch (const Error& e) {
      db.failures.push_back(e.what());
    }
  }

  double sup = 0.0;
  for (long i = 0; i < opt.compare_points; ++i) {
    const double x = -opt.compare_range + 2.0 * opt.compare_range * double(i) / double(opt.compare_points - 1);
    const cplx q = x == 0.0 ? cplx(0.0) : x * ((std::sin(x) + g(x)) * std::cos(x) - (std::cos(x) + h(x)) * std::sin(x));
    sup = std::max(sup, std::abs(q - (f(x) - f0)));
  }
  db.roundtrip_sup_error = sup;
  return db;
}

}  // namespace debranges
