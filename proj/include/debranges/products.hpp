#pragma once

// Symmetric genus-zero canonical products, their ratios to sin / cos and the
// leading constants.

#include <cmath>
#include <vector>

#include <json.hpp>

#include "debranges/core.hpp"
#include "debranges/schrodinger.hpp"
#include "debranges/spectra.hpp"
#include "debranges/zeros.hpp"

namespace debranges {

/// P(z) = K z prod_{n>=1} (1 - z^2/nu_n^2) (sine type) or
/// K prod_{n>=1} (1 - z^2/nu_n^2) (cosine type).
///
/// The product over n > N uses the tail model nu_n^2 = l_n^2 + c, which turns
/// it into T_N(sqrt(z^2 - c)) / T_N(sqrt(-c)) with
/// T_N(s) = prod_{n>N} (1 - s^2/l_n^2) = base(s) / prod_{n<=N} (1 - s^2/l_n^2)
/// and base = sin s / s or cos s. Everything is accumulated in log space.
class CanonicalProduct {
 public:
  CanonicalProduct(ZeroSequence zeros, double K) : zeros_(std::move(zeros)), K_(K) {
    if (!std::isfinite(K_) || K_ == 0.0) throw ConfigError("CanonicalProduct: K must be finite and nonzero");
    log_d_ = -log_tail(std::sqrt(cplx(-zeros_.c_tail(), 0.0)));
    double log_c = std::log(std::abs(K_)) + log_d_.real();
    for (std::size_t n = 1; n <= zeros_.size(); ++n) log_c += 2.0 * std::log(zeros_.lattice(long(n)) / zeros_.positive()[n - 1]);
    leading_ = (K_ > 0 ? 1.0 : -1.0) * std::exp(log_c);
    if (!std::isfinite(leading_) || leading_ == 0.0) throw NumericalError("CanonicalProduct: leading constant diverged");
  }

  const ZeroSequence& zeros() const { return zeros_; }
  double K() const { return K_; }
  Parity parity() const { return zeros_.parity(); }

  /// C1 (sine type) or C2 (cosine type): K prod (l_k / nu_k)^2, tail included.
  double leading_constant() const { return leading_; }

  cplx eval(cplx z) const {
    LogProduct lp;
    lp.multiply(K_);
    if (parity() == Parity::sine) {
      if (z == cplx(0.0)) return 0.0;
      lp.multiply(z);
    }
    for (double nu : zeros_.positive()) {
      const cplx f = (nu - z) * (nu + z) / (nu * nu);
      if (f == cplx(0.0)) return 0.0;
      lp.multiply(f);
    }
    lp.add_log(log_tail(shifted(z)) + log_d_);
    return lp.value();
  }

  /// P(z) / sin z or P(z) / cos z in factored form:
  /// C prod_{n<=N} (nu_n - z)(nu_n + z) / ((l_n - z)(l_n + z)) * T_N(s) / T_N(z).
  cplx ratio_to_trig(cplx z) const { return ratio_without(z, 0); }

  /// P'(nu_n) for 1 <= n <= N, from the ratio with the n-th factor removed.
  double derivative_at_zero(std::size_t n) const {
    if (n < 1 || n > zeros_.size()) throw ConfigError("derivative_at_zero: index out of range");
    const double nu = zeros_.positive()[n - 1];
    const double ell = zeros_.lattice(long(n));
    const cplx r = ratio_without(nu, n);
    return (r * 2.0 * nu * sign_of_parity(long(n)) * sinc(nu - ell) / (ell + nu)).real();
  }

  /// |P(z) / trig(z)| * dist(z, lattice) / dist(z, zeros).
  double trig_bound_ratio(cplx z) const {
    static const ZeroSequence sine_lattice(std::vector<double>{}, Parity::sine, 0.0);
    static const ZeroSequence cosine_lattice(std::vector<double>{}, Parity::cosine, 0.0);
    const double dl = (parity() == Parity::sine ? sine_lattice : cosine_lattice).distance(z);
    return std::abs(ratio_to_trig(z)) * dl / zeros_.distance(z);
  }

  nlohmann::json to_json() const { return {{"zeros", zeros_.to_json()}, {"K", K_}, {"leading_constant", leading_}}; }

 private:
  cplx shifted(cplx z) const {
    cplx s = std::sqrt(z * z - zeros_.c_tail());
    return s;
  }

  /// log T_N(s); T_N is even, so Re s >= 0 is assumed after reflection.
  cplx log_tail(cplx s) const {
    if (s.real() < 0) s = -s;
    const std::size_t N = zeros_.size();
    const bool sine = parity() == Parity::sine;
    const long m = sine ? std::lround(s.real() / pi) : std::lround(s.real() / pi + 0.5);
    const double lm = zeros_.lattice(m);
    const bool remove = m >= 1 && static_cast<std::size_t>(m) <= N && std::abs(s - lm) < 1.0;
    LogProduct lp;
    if (remove) {
      cplx v = sign_of_parity(m + 1) * lm * lm * sinc(s - lm) / (lm + s);
      if (sine) v /= s;
      lp.multiply(v);
    } else if (sine) {
      if (std::abs(s.imag()) < 20.0) lp.multiply(sinc(s));
      else lp.add_log(log_sin(s) - std::log(s));
    } else {
      if (std::abs(s.imag()) < 20.0) lp.multiply(std::cos(s));
      else lp.add_log(log_cos(s));
    }
    for (std::size_t n = 1; n <= N; ++n) {
      if (remove && long(n) == m) continue;
      const double l = zeros_.lattice(long(n));
      lp.multiply(l * l / ((l - s) * (l + s)));
    }
    return lp.log();
  }

  cplx ratio_without(cplx z, std::size_t skip) const {
    for (long n = std::max(1L, std::lround(std::abs(z.real()) / pi) - 1); n <= std::lround(std::abs(z.real()) / pi) + 2; ++n)
      if (z.imag() == 0.0 && std::abs(z.real()) == zeros_.lattice(n) && static_cast<std::size_t>(n) != skip)
        throw NumericalError("ratio_to_trig: z lies on the excluded lattice");
    LogProduct lp;
    lp.multiply(leading_);
    for (std::size_t n = 1; n <= zeros_.size(); ++n) {
      if (n == skip) continue;
      const double nu = zeros_.positive()[n - 1];
      const double l = zeros_.lattice(long(n));
      lp.multiply((nu - z) * (nu + z) / ((l - z) * (l + z)));
    }
    lp.add_log(log_tail(shifted(z)) - log_tail(z));
    return lp.value();
  }

  ZeroSequence zeros_;
  double K_;
  cplx log_d_;
  double leading_ = 0.0;
};

inline cplx eval_product(const CanonicalProduct& p, cplx z) { return p.eval(z); }
inline cplx ratio_to_trig(const CanonicalProduct& p, cplx z) { return p.ratio_to_trig(z); }
inline double leading_constant(const CanonicalProduct& p) { return p.leading_constant(); }

/// Derivatives of a product at its own zeros and values of a partner product
/// there, with their l2 deviations from C (-1)^n and C_other trig_other(l_n).
struct ZeroValueReport {
  std::vector<double> derivative;      ///< P'(nu_n)
  std::vector<double> cross;           ///< Q(nu_n)
  std::vector<double> derivative_dev;  ///< P'(nu_n) - C (-1)^n
  std::vector<double> cross_dev;       ///< Q(nu_n) - C_Q (-1)^n (sine P) or C_Q (-1)^(n+1) (cosine P)
  std::vector<double> derivative_l2;   ///< cumulative sums of squares
  std::vector<double> cross_l2;

  /// Share of the total sum of squares from indices above 3N/4.
  static double last_quarter_share(const std::vector<double>& cum) {
    if (cum.size() < 4 || cum.back() <= 0) return 0.0;
    const std::size_t from = (3 * cum.size()) / 4;
    return (cum.back() - cum[from - 1]) / cum.back();
  }
};

inline ZeroValueReport value_and_derivative_at_zeros(const CanonicalProduct& p, const CanonicalProduct& other) {
  ZeroValueReport r;
  const double c = p.leading_constant();
  const double co = other.leading_constant();
  double sd = 0.0;
  double sc = 0.0;
  for (std::size_t n = 1; n <= p.zeros().size(); ++n) {
    const double nu = p.zeros().positive()[n - 1];
    const double d = p.derivative_at_zero(n);
    const double x = other.eval(nu).real();
    const double sgn = sign_of_parity(long(n));
    const double cross_pattern = p.parity() == Parity::sine ? co * sgn : -co * sgn;
    r.derivative.push_back(d);
    r.cross.push_back(x);
    r.derivative_dev.push_back(d - c * sgn);
    r.cross_dev.push_back(x - cross_pattern);
    sd += r.derivative_dev.back() * r.derivative_dev.back();
    sc += r.cross_dev.back() * r.cross_dev.back();
    r.derivative_l2.push_back(sd);
    r.cross_l2.push_back(sc);
  }
  return r;
}

/// L(y) = y (P(iy) / (C trig(iy)) - 1) at the given heights, and the
/// Richardson estimates 2 L(y_{k+1}) - L(y_k) for successive doublings.
struct SlopeReport {
  std::vector<double> y;
  std::vector<double> L;
  std::vector<double> richardson;
};

inline SlopeReport imaginary_axis_slope(const CanonicalProduct& p, const std::vector<double>& ys) {
  SlopeReport r;
  for (double y : ys) {
    r.y.push_back(y);
    r.L.push_back(y * (p.ratio_to_trig(cplx(0.0, y)) / p.leading_constant() - 1.0).real());
  }
  for (std::size_t i = 0; i + 1 < r.L.size(); ++i) {
    const double ratio = r.y[i + 1] / r.y[i];
    r.richardson.push_back((ratio * r.L[i + 1] - r.L[i]) / (ratio - 1.0));
  }
  return r;
}

/// Product-backed pair A (sine type) and B (cosine type) as an evaluator.
inline DeBrangesEvaluator make_evaluator(std::shared_ptr<const CanonicalProduct> a,
                                         std::shared_ptr<const CanonicalProduct> b, std::string description) {
  return DeBrangesEvaluator([a = std::move(a), b = std::move(b)](cplx z) { return ABValue{a->eval(z), b->eval(z)}; },
                            std::move(description));
}

/// Spectra, fit and products of a Schrödinger de Branges function.
struct QBackedProducts {
  SpectrumPair spectra;
  AsymptoticFit fit;
  std::shared_ptr<const CanonicalProduct> A;
  std::shared_ptr<const CanonicalProduct> B;
};

/// K_A = A'(0) = u_0(1) and K_B = B(0) = u'_0(1) come from shooting at w = 0.
inline QBackedProducts q_backed_products(const Shooter& sh, std::size_t N) {
  QBackedProducts out;
  out.spectra = compute_spectra(sh, N);
  out.fit = asymptotic_fit(out.spectra);
  auto [lam, mu] = sqrt_transform(out.spectra, out.fit.C_hat);
  const auto r0 = sh.shoot(0.0);
  out.A = std::make_shared<const CanonicalProduct>(std::move(lam), r0.u_end.real());
  out.B = std::make_shared<const CanonicalProduct>(std::move(mu), r0.du_end.real());
  return out;
}

}  // namespace debranges
