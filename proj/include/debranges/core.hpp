#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

namespace debranges {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: malformed potential, bad option values, unknown names.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance or lost its invariant.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline double sign_of_parity(long long n) { return (n % 2 == 0) ? 1.0 : -1.0; }

/// sin(z)/z, accurate near the origin.
inline cplx sinc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// 1/d - cot(d), the regular part of -cot near its pole at 0.
inline cplx cot_regular(cplx d) {
  if (std::abs(d) < 1e-2) {
    const cplx d2 = d * d;
    return d * (1.0 / 3.0 + d2 * (1.0 / 45.0 + d2 * (2.0 / 945.0 + d2 / 4725.0)));
  }
  return 1.0 / d - std::cos(d) / std::sin(d);
}

/// log(sin z) without overflow for large |Im z|. The branch is arbitrary;
/// callers only exponentiate sums of these.
inline cplx log_sin(cplx z) {
  const double y = z.imag();
  if (std::abs(y) < 20.0) return std::log(std::sin(z));
  if (y > 0) return -I * z + std::log((std::exp(2.0 * I * z) - 1.0) / (2.0 * I));
  return I * z + std::log((1.0 - std::exp(-2.0 * I * z)) / (2.0 * I));
}

inline cplx log_cos(cplx z) {
  const double y = z.imag();
  if (std::abs(y) < 20.0) return std::log(std::cos(z));
  if (y > 0) return -I * z + std::log((std::exp(2.0 * I * z) + 1.0) / 2.0);
  return I * z + std::log((1.0 + std::exp(-2.0 * I * z)) / 2.0);
}

/// Running product of complex factors kept as mantissa plus log so that long
/// products of large or small factors neither overflow nor underflow.
class LogProduct {
 public:
  void multiply(cplx factor) {
    mantissa_ *= factor;
    const double n = std::norm(mantissa_);
    if (n > 1e200 || n < 1e-200) flush();
  }
  void add_log(cplx l) { log_ += l; }
  cplx log() const { return log_ + std::log(mantissa_); }
  cplx value() const { return std::exp(log()); }

 private:
  void flush() {
    log_ += std::log(mantissa_);
    mantissa_ = 1.0;
  }
  cplx mantissa_{1.0, 0.0};
  cplx log_{0.0, 0.0};
};

/// Root of a continuous function on [a, b] given a sign change, via TOMS 748.
template <class F>
double bracketed_root(F&& f, double a, double b, double fa, double fb, double rel_tol = 1e-14,
                      std::uintmax_t max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericalError("bracketed_root: no sign change on bracket");
  auto tol = [rel_tol](double lo, double hi) {
    return std::abs(hi - lo) <= rel_tol * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  };
  std::uintmax_t iters = max_iter;
  auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  if (iters >= max_iter) throw NumericalError("bracketed_root: iteration limit reached");
  return 0.5 * (lo + hi);
}

template <class F>
double bracketed_root(F&& f, double a, double b, double rel_tol = 1e-14) {
  return bracketed_root(f, a, b, f(a), f(b), rel_tol);
}

}  // namespace debranges
