#pragma once

// Cardinal series, l2 membership diagnostics on critical lattices and Riesz
// basis expansions over complete interpolating sequences.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include <json.hpp>

#include "debranges/core.hpp"
#include "debranges/products.hpp"
#include "debranges/zeros.hpp"

namespace debranges {

/// Samples f(offset + m step), m = -M..M, of a function of exponential type
/// at most type_bound, with step = pi / type_bound.
struct BandlimitedSamples {
  double step = pi;
  double offset = 0.0;
  std::vector<double> samples;  ///< samples[m + M]
  double type_bound = 1.0;
  double tail_l2 = 0.0;  ///< estimated l2 mass of samples with |m| > M

  long M() const { return (static_cast<long>(samples.size()) - 1) / 2; }
  double at(long m) const { return samples[static_cast<std::size_t>(m + M())]; }
};

/// Estimated l2 mass beyond |m| > M assuming samples decay like 1/|m|, from
/// the outer tenth of the window.
inline double estimate_tail_l2(const std::vector<double>& samples) {
  const long M = (static_cast<long>(samples.size()) - 1) / 2;
  if (M < 10) return 0.0;
  double acc = 0.0;
  long count = 0;
  for (long m = M - M / 10; m <= M; ++m) {
    const double a = samples[static_cast<std::size_t>(m + M)];
    const double b = samples[static_cast<std::size_t>(-m + M)];
    acc += (a * a + b * b) * double(m) * double(m);
    count += 2;
  }
  return std::sqrt(2.0 * (acc / double(count)) / double(M));
}

inline BandlimitedSamples sample_function(const std::function<double(double)>& f, double type_bound, long M,
                                          double offset = 0.0) {
  if (!(type_bound > 0)) throw ConfigError("sample_function: type_bound must be positive");
  if (M < 0) throw ConfigError("sample_function: M must be nonnegative");
  BandlimitedSamples s;
  s.type_bound = type_bound;
  s.step = pi / type_bound;
  s.offset = offset;
  s.samples.resize(static_cast<std::size_t>(2 * M + 1));
  for (long m = -M; m <= M; ++m) s.samples[static_cast<std::size_t>(m + M)] = f(offset + double(m) * s.step);
  s.tail_l2 = estimate_tail_l2(s.samples);
  return s;
}

struct CardinalValue {
  cplx value;
  double error_bound;  ///< truncation bound from tail_l2; infinite outside the window
};

/// Whittaker series sum_m s_m sinc((z - offset)/step - m), summed in pairs
/// (m, -m). Exact at lattice points.
inline CardinalValue cardinal_eval(const BandlimitedSamples& s, cplx z) {
  const long M = s.M();
  const cplx u = (z - s.offset) / s.step;
  const long m0 = std::clamp(std::lround(u.real()), -M - 1, M + 1);
  const cplx d = u - double(m0);
  // Lattice points up to rounding in (z - offset)/step.
  if (std::abs(d) <= 1e-13 && m0 >= -M && m0 <= M) return {s.at(m0), 0.0};
  const cplx sin_pd = std::sin(pi * d);
  cplx centre = 0.0;
  cplx acc = 0.0;
  auto term = [&](long m) -> cplx {
    if (m < -M || m > M) return 0.0;
    const double v = s.at(m);
    if (m == m0) {
      centre = v * sinc(pi * d);
      return 0.0;
    }
    return sign_of_parity(m - m0) * v / (d + double(m0 - m));
  };
  acc += term(0);
  for (long k = 1; k <= M; ++k) acc += term(k) + term(-k);
  const cplx value = centre + sin_pd / pi * acc;
  const double margin = double(M) - std::abs(u.real());
  const double bound = margin > 1.0 ? s.tail_l2 * std::abs(sin_pd) / pi * std::sqrt(2.0 / margin)
                                    : std::numeric_limits<double>::infinity();
  return {value, bound};
}

/// sqrt(step * sum samples^2), the L2 norm of the cardinal interpolant.
inline double plancherel_norm(const BandlimitedSamples& s) {
  double acc = 0.0;
  const long M = s.M();
  acc += s.at(0) * s.at(0);
  for (long k = 1; k <= M; ++k) acc += s.at(k) * s.at(k) + s.at(-k) * s.at(-k);
  return std::sqrt(s.step * acc);
}

struct MembershipOptions {
  long M = 2000;
  double tail_fraction = 0.1;
  double noise_floor = 1e-8;  ///< per-sample noise level absorbed by the verdict
};

struct MembershipReport {
  double C_hat = 0.0;
  std::vector<double> cumsum;  ///< cumsum[k] = sum over |m| <= k of (F - C_hat)^2
  bool verdict = false;
  long M = 0;
  double tail_fraction = 0.0;
  double step = 0.0;
  double offset = 0.0;
  double last_quarter_increment = 0.0;
  std::vector<double> samples;  ///< F(offset + m step), m = -M..M

  nlohmann::json to_json() const {
    return {{"C_hat", C_hat},
            {"cumsum", cumsum},
            {"verdict", verdict},
            {"M", M},
            {"tail_fraction", tail_fraction},
            {"step", step},
            {"offset", offset},
            {"last_quarter_increment", last_quarter_increment}};
  }
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + h, v.end());
  if (v.size() % 2 == 1) return v[h];
  const double upper = v[h];
  const double lower = *std::max_element(v.begin(), v.begin() + h);
  return 0.5 * (lower + upper);
}

/// Diagnostic test that F - C is l2 on the lattice offset + (pi/type_bound) Z.
/// C_hat is the median of samples with |m| in [M/2, M]; the verdict is
/// positive when the cumulative sum of squares grows by at most
/// tail_fraction of its total (plus the noise allowance) over the last
/// quarter of the window.
inline MembershipReport pw_membership_test(const std::function<double(double)>& F, double type_bound,
                                           const MembershipOptions& opt = {}, double offset = 0.0) {
  if (opt.M < 8) throw ConfigError("pw_membership_test: M must be at least 8");
  if (!(opt.tail_fraction > 0 && opt.tail_fraction < 1)) throw ConfigError("pw_membership_test: tail_fraction must lie in (0, 1)");
  MembershipReport r;
  r.M = opt.M;
  r.tail_fraction = opt.tail_fraction;
  r.step = pi / type_bound;
  r.offset = offset;
  r.samples.resize(static_cast<std::size_t>(2 * opt.M + 1));
  for (long m = -opt.M; m <= opt.M; ++m) {
    const double v = F(offset + double(m) * r.step);
    if (!std::isfinite(v)) throw NumericalError("pw_membership_test: non-finite sample at m = " + std::to_string(m));
    r.samples[static_cast<std::size_t>(m + opt.M)] = v;
  }
  auto at = [&](long m) { return r.samples[static_cast<std::size_t>(m + opt.M)]; };
  std::vector<double> tail;
  for (long m = opt.M / 2; m <= opt.M; ++m) {
    tail.push_back(at(m));
    tail.push_back(at(-m));
  }
  r.C_hat = median(std::move(tail));
  double acc = (at(0) - r.C_hat) * (at(0) - r.C_hat);
  r.cumsum.push_back(acc);
  for (long k = 1; k <= opt.M; ++k) {
    acc += (at(k) - r.C_hat) * (at(k) - r.C_hat) + (at(-k) - r.C_hat) * (at(-k) - r.C_hat);
    r.cumsum.push_back(acc);
  }
  const long q = (3 * opt.M) / 4;
  r.last_quarter_increment = r.cumsum.back() - r.cumsum[static_cast<std::size_t>(q)];
  const double n_tail = 2.0 * double(opt.M - q);
  r.verdict = r.last_quarter_increment <= opt.tail_fraction * r.cumsum.back() + n_tail * opt.noise_floor * opt.noise_floor;
  return r;
}

/// g(z) = sum_n G(z) / (G'(t_n)(z - t_n)) w_n over a complete interpolating
/// sequence t_n given as the zero set of the generator G.
class RieszExpansion {
 public:
  /// `values` are indexed like `generator.zeros().symmetric()`.
  RieszExpansion(std::shared_ptr<const CanonicalProduct> generator, std::vector<double> values, double tail_l2 = 0.0)
      : gen_(std::move(generator)), nodes_(gen_->zeros().symmetric()), values_(std::move(values)), tail_l2_(tail_l2) {
    if (values_.size() != nodes_.size()) throw ConfigError("riesz_expand: one value per node is required");
    const auto& z = gen_->zeros();
    const bool sine = z.parity() == Parity::sine;
    const std::size_t N = z.size();
    deriv_.resize(nodes_.size());
    for (std::size_t n = 1; n <= N; ++n) {
      const double d = gen_->derivative_at_zero(n);
      // G' is even for odd G (sine type) and odd for even G.
      deriv_[(sine ? N + n : N - 1 + n)] = d;
      deriv_[N - n] = sine ? d : -d;
    }
    if (sine) deriv_[N] = gen_->K();
    for (double d : deriv_)
      if (d == 0.0 || !std::isfinite(d)) throw NumericalError("riesz_expand: degenerate generator derivative");
  }

  const std::vector<double>& nodes() const { return nodes_; }

  cplx operator()(cplx z) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (z == cplx(nodes_[i])) return values_[i];
    const cplx g = gen_->eval(z);
    cplx acc = 0.0;
    const std::size_t c = nodes_.size() / 2;
    auto term = [&](std::size_t i) { return values_[i] / (deriv_[i] * (z - nodes_[i])); };
    if (nodes_.size() % 2 == 1) {
      acc += term(c);
      for (std::size_t k = 1; k <= c; ++k) acc += term(c + k) + term(c - k);
    } else {
      for (std::size_t k = 0; k < c; ++k) acc += term(c + k) + term(c - 1 - k);
    }
    return g * acc;
  }

  /// Cauchy-Schwarz bound on the omitted terms given their l2 mass.
  double tail_bound(cplx z) const {
    if (tail_l2_ == 0.0) return 0.0;
    const double reach = gen_->zeros().positive().empty() ? 0.0 : gen_->zeros().positive().back();
    const double margin = (reach - std::abs(z.real())) / pi;
    if (margin <= 1.0) return std::numeric_limits<double>::infinity();
    return std::abs(gen_->eval(z)) / std::abs(gen_->leading_constant()) * tail_l2_ * std::sqrt(2.0 / margin) / pi;
  }

 private:
  std::shared_ptr<const CanonicalProduct> gen_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> deriv_;
  double tail_l2_;
};

inline RieszExpansion riesz_expand(std::shared_ptr<const CanonicalProduct> generator, std::vector<double> values,
                                   double tail_l2 = 0.0) {
  return RieszExpansion(std::move(generator), std::move(values), tail_l2);
}

}  // namespace debranges
