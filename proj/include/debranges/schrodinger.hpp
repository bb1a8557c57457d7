#pragma once

// Shooting for -u'' + q u = w u on [0, 1] and the de Branges function
// E(z) = z u_{z^2}(1) + i u'_{z^2}(1).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "debranges/core.hpp"
#include "debranges/potential.hpp"

namespace debranges {

struct ShootingResult {
  cplx u_end;
  cplx du_end;
  cplx w;
  long step_count = 0;
  double est_error = 0.0;
};

struct ABValue {
  cplx A;
  cplx B;
  cplx E() const { return A + I * B; }
};

namespace detail {

template <class T>
struct Mat2 {
  T a, b, c, d;
};

template <class T>
Mat2<T> operator+(const Mat2<T>& x, const Mat2<T>& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}
template <class T>
Mat2<T> operator*(double s, const Mat2<T>& x) {
  return {s * x.a, s * x.b, s * x.c, s * x.d};
}
template <class T>
Mat2<T> commutator(const Mat2<T>& x, const Mat2<T>& y) {
  // xy - yx for 2x2 matrices.
  const T bc = x.b * y.c - x.c * y.b;
  const T ab = (x.a - x.d) * y.b - x.b * (y.a - y.d);
  const T ca = x.c * (y.a - y.d) - (x.a - x.d) * y.c;
  return {bc, ab, ca, -bc};
}

inline constexpr double gauss_c1 = 0.5 - 0.3872983346207416885;  // 1/2 - sqrt(15)/10
inline constexpr double gauss_c3 = 0.5 + 0.3872983346207416885;
inline constexpr double sqrt15 = 3.8729833462074168852;

inline double sinhc_real(double s2, double& ch) {
  if (std::abs(s2) < 1e-6) {
    ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0;
    return 1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
  }
  if (s2 > 0) {
    const double s = std::sqrt(s2);
    ch = std::cosh(s);
    return std::sinh(s) / s;
  }
  const double s = std::sqrt(-s2);
  ch = std::cos(s);
  return std::sin(s) / s;
}

inline cplx sinhc_complex(cplx s2, cplx& ch) {
  if (std::abs(s2) < 1e-6) {
    ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0;
    return 1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
  }
  const cplx s = std::sqrt(s2);
  ch = std::cosh(s);
  return std::sinh(s) / s;
}

/// One sixth-order Magnus step for y' = [[0, 1], [p(t), 0]] y, with p sampled
/// at the three Gauss nodes of the step.
template <class T>
Mat2<T> magnus_propagator(double h, T p1, T p2, T p3) {
  const Mat2<T> a1{T(0), T(h), h * p2, T(0)};
  const Mat2<T> a2{T(0), T(0), (sqrt15 * h / 3.0) * (p3 - p1), T(0)};
  const Mat2<T> a3{T(0), T(0), (10.0 * h / 3.0) * (p3 - 2.0 * p2 + p1), T(0)};
  const Mat2<T> c1 = commutator(a1, a2);
  const Mat2<T> c2 = (-1.0 / 60.0) * commutator(a1, 2.0 * a3 + c1);
  const Mat2<T> om = a1 + (1.0 / 12.0) * a3 + (1.0 / 240.0) * commutator((-20.0) * a1 + (-1.0) * a3 + c1, a2 + c2);
  const T diag = 0.5 * (om.a - om.d);
  const T s2 = diag * diag + om.b * om.c;
  T ch;
  T sh;
  if constexpr (std::is_same_v<T, double>) sh = sinhc_real(s2, ch);
  else sh = sinhc_complex(s2, ch);
  return {ch + sh * diag, sh * om.b, sh * om.c, ch - sh * diag};
}

struct MagnusNode {
  double h;
  double q1, q2, q3;
};

/// Steps aligned with the potential's breakpoints, roughly `density` per unit length.
inline std::vector<MagnusNode> build_steps(const Potential& q, long density) {
  std::vector<MagnusNode> steps;
  const auto bp = q.breakpoints();
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const double len = bp[s + 1] - bp[s];
    const long n = std::max(1L, static_cast<long>(std::ceil(len * double(density) - 1e-9)));
    const double h = len / double(n);
    for (long j = 0; j < n; ++j) {
      const double t0 = bp[s] + double(j) * h;
      steps.push_back({h, q.value_on(s, t0 + gauss_c1 * h), q.value_on(s, t0 + 0.5 * h), q.value_on(s, t0 + gauss_c3 * h)});
    }
  }
  return steps;
}

template <class T>
std::array<T, 2> propagate(const std::vector<MagnusNode>& steps, T w, std::array<T, 2> y) {
  for (const auto& st : steps) {
    const auto m = magnus_propagator<T>(st.h, st.q1 - w, st.q2 - w, st.q3 - w);
    y = {m.a * y[0] + m.b * y[1], m.c * y[0] + m.d * y[1]};
  }
  return y;
}

/// Relative distance between two shooting states at spectral parameter w.
inline double state_distance(const std::array<cplx, 2>& x, const std::array<cplx, 2>& y, cplx w) {
  const double k = std::max(1.0, std::abs(std::sqrt(w)));
  const double scale = std::max({1.0, k * std::abs(y[0]), std::abs(y[1])});
  return std::max(k * std::abs(x[0] - y[0]), std::abs(x[1] - y[1])) / scale;
}

inline constexpr long max_density = 1L << 20;

}  // namespace detail

/// Adaptive shooting from u(0) = 0, u'(0) = 1 with sixth-order Magnus steps.
/// The step density doubles until two successive results agree to `tol`
/// (relative to the solution scale); the finer result is returned.
inline ShootingResult solve_shooting(const Potential& q, cplx w, double tol) {
  if (!(tol > 0)) throw ConfigError("solve_shooting: tol must be positive");
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) throw ConfigError("solve_shooting: non-finite w");
  long density = std::max(16L, static_cast<long>(std::ceil(2.0 * std::abs(std::sqrt(w)))));
  auto steps = detail::build_steps(q, density);
  auto coarse = detail::propagate<cplx>(steps, w, {0.0, 1.0});
  long total = static_cast<long>(steps.size());
  while (density < detail::max_density) {
    density *= 2;
    steps = detail::build_steps(q, density);
    const auto fine = detail::propagate<cplx>(steps, w, {0.0, 1.0});
    total += static_cast<long>(steps.size());
    const double err = detail::state_distance(coarse, fine, w);
    if (err <= tol) return {fine[0], fine[1], w, total, err};
    coarse = fine;
  }
  throw NumericalError("solve_shooting: step-size underflow at w = " + std::to_string(w.real()) + "+" +
                       std::to_string(w.imag()) + "i");
}

/// Reusable shooting engine for one potential.
///
/// Step densities are calibrated at construction for bands of |sqrt(w)| and
/// frozen, so every evaluation inside a band uses one fixed step grid. The
/// computed A and B are then entire functions of z, which keeps Newton and
/// argument-principle computations consistent. Outside the calibrated bands
/// evaluation falls back to `solve_shooting`.
class Shooter {
 public:
  explicit Shooter(Potential q, double tol = 1e-11, double depth = 10.0) : q_(std::move(q)), tol_(tol) {
    if (!(tol > 0)) throw ConfigError("Shooter: tol must be positive");
    for (double bound : {16.0, 64.0, 256.0, 1024.0, 4096.0}) bands_.push_back(calibrate(bound, depth));
  }

  const Potential& potential() const { return q_; }
  double tol() const { return tol_; }

  ShootingResult shoot(cplx w) const {
    const double k = std::abs(std::sqrt(w));
    for (const auto& band : bands_) {
      if (k <= band.bound) {
        const auto y = detail::propagate<cplx>(band.steps, w, {0.0, 1.0});
        return {y[0], y[1], w, static_cast<long>(band.steps.size()), band.error};
      }
    }
    return solve_shooting(q_, w, tol_);
  }

  /// v with v(0) = 1, v'(0) = 0.
  std::array<cplx, 2> shoot_neumann(cplx w) const {
    const double k = std::abs(std::sqrt(w));
    for (const auto& band : bands_)
      if (k <= band.bound) return detail::propagate<cplx>(band.steps, w, {1.0, 0.0});
    return detail::propagate<cplx>(detail::build_steps(q_, std::max(16L, long(4 * k))), w, {1.0, 0.0});
  }

  ABValue ab(cplx z) const {
    if (z == cplx(0.0)) {
      const auto r = shoot(0.0);
      return {0.0, r.du_end};
    }
    const auto r = shoot(z * z);
    return {z * r.u_end, r.du_end};
  }

  /// Steps per unit length used in each band, for diagnostics.
  std::vector<std::pair<double, long>> band_densities() const {
    std::vector<std::pair<double, long>> out;
    for (const auto& b : bands_) out.emplace_back(b.bound, b.density);
    return out;
  }

 private:
  struct Band {
    double bound;
    long density;
    double error;
    std::vector<detail::MagnusNode> steps;
  };

  Band calibrate(double bound, double depth) const {
    const std::array<cplx, 2> probes{cplx(bound, 0.0), cplx(bound, -depth)};
    long density = 16;
    auto steps = detail::build_steps(q_, density);
    while (density < detail::max_density) {
      auto fine_steps = detail::build_steps(q_, 2 * density);
      double err = 0.0;
      for (cplx z : probes) {
        const cplx w = z * z;
        err = std::max(err, detail::state_distance(detail::propagate<cplx>(steps, w, {0.0, 1.0}),
                                                   detail::propagate<cplx>(fine_steps, w, {0.0, 1.0}), w));
      }
      if (err <= tol_) return {bound, 2 * density, err, std::move(fine_steps)};
      density *= 2;
      steps = std::move(fine_steps);
    }
    throw NumericalError("Shooter: calibration failed for |z| <= " + std::to_string(bound));
  }

  Potential q_;
  double tol_;
  std::vector<Band> bands_;
};

inline ABValue evaluate_AB(const Potential& q, cplx z, double tol) {
  if (z == cplx(0.0)) return {0.0, solve_shooting(q, 0.0, tol).du_end};
  const auto r = solve_shooting(q, z * z, tol);
  return {z * r.u_end, r.du_end};
}

/// Maximum deviation of the propagator determinant (the Wronskian of the two
/// fundamental solutions) from 1 along the whole integration.
inline double wronskian_defect(const Potential& q, cplx w, long density = 256) {
  const auto steps = detail::build_steps(q, density);
  detail::Mat2<cplx> phi{1.0, 0.0, 0.0, 1.0};
  double worst = 0.0;
  for (const auto& st : steps) {
    const auto m = detail::magnus_propagator<cplx>(st.h, st.q1 - w, st.q2 - w, st.q3 - w);
    phi = {m.a * phi.a + m.b * phi.c, m.a * phi.b + m.b * phi.d, m.c * phi.a + m.d * phi.c, m.c * phi.b + m.d * phi.d};
    worst = std::max(worst, std::abs(phi.a * phi.d - phi.b * phi.c - 1.0) /
                                std::max(1.0, std::abs(phi.a * phi.d)));
  }
  return worst;
}

/// Boundary conditions for eigenvalue counting.
enum class BoundaryKind {
  dd,  ///< u(0) = 0, u(1) = 0
  dn,  ///< u(0) = 0, u'(1) = 0 (zeros of B)
  nd   ///< u'(0) = 0, u(1) = 0
};

/// Number of eigenvalues strictly below real w, from a scaled Prüfer angle.
inline long count_eigenvalues_below(const Potential& q, double w, BoundaryKind kind) {
  const double k = std::sqrt(std::max(std::abs(w), 1.0));
  const double rate = k + (std::abs(w) + q.abs_bound()) / k;
  const long density = 32 + static_cast<long>(std::ceil(4.0 * rate));
  const auto bp = q.breakpoints();
  std::array<double, 2> y = kind == BoundaryKind::nd ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
  double theta = std::atan2(k * y[0], y[1]);
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const double len = bp[s + 1] - bp[s];
    const long n = std::max(1L, static_cast<long>(std::ceil(len * double(density))));
    const double h = len / double(n);
    for (long j = 0; j < n; ++j) {
      const double t0 = bp[s] + double(j) * h;
      const auto m = detail::magnus_propagator<double>(h, q.value_on(s, t0 + detail::gauss_c1 * h) - w,
                                                       q.value_on(s, t0 + 0.5 * h) - w,
                                                       q.value_on(s, t0 + detail::gauss_c3 * h) - w);
      y = {m.a * y[0] + m.b * y[1], m.c * y[0] + m.d * y[1]};
      const double norm = std::hypot(y[0], y[1]);
      y[0] /= norm;
      y[1] /= norm;
      const double raw = std::atan2(k * y[0], y[1]);
      theta += std::remainder(raw - theta, 2.0 * pi);
    }
  }
  const double turns = theta / pi;
  if (kind == BoundaryKind::dn) return static_cast<long>(std::floor(turns + 0.5));
  return static_cast<long>(std::floor(turns));
}

/// Lowest eigenvalue for the given boundary conditions, by bisection on the
/// eigenvalue count.
inline double lowest_eigenvalue(const Potential& q, BoundaryKind kind, double rel_tol = 1e-12) {
  const auto [qlo, qhi] = q.bounds();
  const double base = kind == BoundaryKind::dd ? pi * pi : pi * pi / 4.0;
  double lo = base + qlo - 1.0;
  double hi = base + qhi + 1.0;
  while (count_eigenvalues_below(q, lo, kind) > 0) lo -= 2.0 * (hi - lo);
  while (count_eigenvalues_below(q, hi, kind) < 1) hi += 2.0 * (hi - lo);
  while (hi - lo > rel_tol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (count_eigenvalues_below(q, mid, kind) >= 1) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Adds a constant to q so that the DD, DN and ND operators are all positive.
/// The returned potential records the constant in its shift; the shift is 0
/// when q is already positive.
inline Potential positivity_shift(const Potential& q) {
  const Potential base = q.with_shift(0.0);
  bool positive = true;
  for (auto kind : {BoundaryKind::dd, BoundaryKind::dn, BoundaryKind::nd})
    if (count_eigenvalues_below(base, 1e-9, kind) > 0) positive = false;
  if (positive) return base;
  double lowest = std::numeric_limits<double>::infinity();
  for (auto kind : {BoundaryKind::dd, BoundaryKind::dn, BoundaryKind::nd})
    lowest = std::min(lowest, lowest_eigenvalue(base, kind));
  return base.with_shift(1.0 - lowest);
}

/// Evaluator of the pair (A, B) of a de Branges function E = A + iB.
class DeBrangesEvaluator {
 public:
  using Fn = std::function<ABValue(cplx)>;

  DeBrangesEvaluator(Fn fn, std::string description) : fn_(std::move(fn)), description_(std::move(description)) {}

  ABValue operator()(cplx z) const { return fn_(z); }
  cplx A(cplx z) const { return fn_(z).A; }
  cplx B(cplx z) const { return fn_(z).B; }
  cplx E(cplx z) const { return fn_(z).E(); }
  /// E#(z) = conj(E(conj z)).
  cplx E_sharp(cplx z) const { return std::conj(E(std::conj(z))); }
  const std::string& description() const { return description_; }

 private:
  Fn fn_;
  std::string description_;
};

inline DeBrangesEvaluator make_evaluator(std::shared_ptr<const Shooter> shooter) {
  std::string desc = "schrodinger:" + shooter->potential().describe();
  return DeBrangesEvaluator([s = std::move(shooter)](cplx z) { return s->ab(z); }, std::move(desc));
}

inline DeBrangesEvaluator make_evaluator(const Potential& q, double tol = 1e-11) {
  return make_evaluator(std::make_shared<const Shooter>(q, tol));
}

}  // namespace debranges
