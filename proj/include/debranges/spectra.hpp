#pragma once

// DD and D-N spectra, asymptotic fit, Weyl functions and the phase function.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "debranges/core.hpp"
#include "debranges/schrodinger.hpp"
#include "debranges/zeros.hpp"

namespace debranges {

/// dd[n-1] = lambda_n^2 (zeros of w -> u_w(1)); nd[n-1] = mu_n^2 (zeros of
/// w -> u'_w(1), i.e. of B after the square-root transform).
struct SpectrumPair {
  std::vector<double> dd;
  std::vector<double> nd;
  std::size_t N = 0;
  double shift = 0.0;
  double potential_mean = 0.0;
};

struct AsymptoticFit {
  double C_hat = 0.0;
  double expected_C = 0.0;  ///< potential mean plus shift
  std::vector<double> residuals_a;
  std::vector<double> residuals_b;
  std::vector<double> l2_partial_a;
  std::vector<double> l2_partial_b;
  std::size_t fit_from = 0;  ///< first 1-based index used in the fit

  /// Share of the total sum of squares contributed by indices n >= from.
  double tail_share_a(std::size_t from) const { return tail_share(l2_partial_a, from); }
  double tail_share_b(std::size_t from) const { return tail_share(l2_partial_b, from); }

 private:
  static double tail_share(const std::vector<double>& cum, std::size_t from) {
    if (cum.empty() || from < 2 || from > cum.size()) return 0.0;
    const double total = cum.back();
    return total > 0 ? (total - cum[from - 2]) / total : 0.0;
  }
};

namespace detail {

/// Real-valued shooting target: u_w(1) for DD, u'_w(1) for D-N.
inline double spectral_target(const Shooter& sh, double w, BoundaryKind kind) {
  const auto r = sh.shoot(w);
  return kind == BoundaryKind::dd ? r.u_end.real() : r.du_end.real();
}

inline double nth_eigenvalue(const Shooter& sh, std::size_t n, BoundaryKind kind, double rel_tol) {
  const Potential& q = sh.potential();
  const auto [qlo, qhi] = q.bounds();
  const double ell = kind == BoundaryKind::dd ? pi * double(n) : pi * (double(n) - 0.5);
  double lo = ell * ell + qlo - 1e-6 * (1.0 + std::abs(qlo));
  double hi = ell * ell + qhi + 1e-6 * (1.0 + std::abs(qhi));
  const long target = static_cast<long>(n);
  int expand = 0;
  while (count_eigenvalues_below(q, lo, kind) > target - 1) {
    lo -= (hi - lo) + 1.0;
    if (++expand > 60) throw NumericalError("compute_spectra: bracketing failed at index " + std::to_string(n));
  }
  while (count_eigenvalues_below(q, hi, kind) < target) {
    hi += (hi - lo) + 1.0;
    if (++expand > 60) throw NumericalError("compute_spectra: bracketing failed at index " + std::to_string(n));
  }
  // Shrink until the bracket holds exactly the n-th eigenvalue.
  for (int it = 0; it < 200; ++it) {
    const long clo = count_eigenvalues_below(q, lo, kind);
    const long chi = count_eigenvalues_below(q, hi, kind);
    if (clo == target - 1 && chi == target) break;
    const double mid = 0.5 * (lo + hi);
    const long cm = count_eigenvalues_below(q, mid, kind);
    if (cm >= target) hi = mid;
    else lo = mid;
  }
  auto f = [&](double w) { return spectral_target(sh, w, kind); };
  double flo = f(lo);
  double fhi = f(hi);
  // Counting and shooting use different grids; nudge if the sign change is
  // hidden by a root sitting on the bracket edge.
  for (int it = 0; it < 8 && (flo > 0) == (fhi > 0) && flo != 0.0 && fhi != 0.0; ++it) {
    const double pad = (hi - lo) * 0.01 + 1e-9 * std::max(1.0, std::abs(hi));
    lo -= pad;
    hi += pad;
    flo = f(lo);
    fhi = f(hi);
  }
  try {
    return bracketed_root(f, lo, hi, flo, fhi, rel_tol);
  } catch (const NumericalError& e) {
    throw NumericalError("compute_spectra: index " + std::to_string(n) + ": " + e.what());
  }
}

}  // namespace detail

/// First N DD eigenvalues and first N zeros of w -> u'_w(1), bracketed by
/// Prüfer counting and refined by TOMS 748. Interlacing is verified.
inline SpectrumPair compute_spectra(const Shooter& sh, std::size_t N, double rel_tol = 1e-14) {
  if (N == 0) throw ConfigError("compute_spectra: N must be positive");
  SpectrumPair s;
  s.N = N;
  s.shift = sh.potential().shift();
  s.potential_mean = sh.potential().mean();
  for (std::size_t n = 1; n <= N; ++n) {
    s.dd.push_back(detail::nth_eigenvalue(sh, n, BoundaryKind::dd, rel_tol));
    s.nd.push_back(detail::nth_eigenvalue(sh, n, BoundaryKind::dn, rel_tol));
  }
  for (std::size_t i = 0; i < N; ++i) {
    const bool ok = s.nd[i] < s.dd[i] && (i + 1 == N || s.dd[i] < s.nd[i + 1]);
    if (!ok) throw NumericalError("compute_spectra: spectra do not interlace at index " + std::to_string(i + 1));
  }
  return s;
}

inline SpectrumPair compute_spectra(const Potential& q, std::size_t N, double tol = 1e-11) {
  return compute_spectra(Shooter(q, tol), N);
}

enum class FitModel {
  constant,                ///< C alone
  constant_inverse_square  ///< C + D/n^2
};

/// Fit of lambda_n^2 = pi^2 n^2 + C + a_n, mu_n^2 = pi^2 (n - 1/2)^2 + C + b_n.
///
/// The constant is fitted by least squares over the top half of indices of
/// both sequences with equal weights. The default model carries an extra D/n^2
/// term, which absorbs the leading decay of a_n and b_n for smooth q; only C
/// enters the residuals.
inline AsymptoticFit asymptotic_fit(const SpectrumPair& s, FitModel model = FitModel::constant_inverse_square) {
  if (s.N < 5) throw ConfigError("asymptotic_fit: need N >= 5");
  AsymptoticFit fit;
  fit.expected_C = s.potential_mean + s.shift;
  fit.fit_from = s.N / 2 + 1;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t n = fit.fit_from; n <= s.N; ++n) {
    const double nn = double(n);
    const double mm = nn - 0.5;
    xs.push_back(1.0 / (nn * nn));
    ys.push_back(s.dd[n - 1] - pi * pi * nn * nn);
    xs.push_back(1.0 / (mm * mm));
    ys.push_back(s.nd[n - 1] - pi * pi * mm * mm);
  }
  const double m = double(xs.size());
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  if (model == FitModel::constant) {
    fit.C_hat = ybar;
  } else {
    const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - xbar) * (xs[i] - xbar);
      sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    fit.C_hat = ybar - (sxy / sxx) * xbar;
  }
  double ca = 0.0;
  double cb = 0.0;
  for (std::size_t n = 1; n <= s.N; ++n) {
    const double nn = double(n);
    const double a = s.dd[n - 1] - pi * pi * nn * nn - fit.C_hat;
    const double b = s.nd[n - 1] - pi * pi * (nn - 0.5) * (nn - 0.5) - fit.C_hat;
    fit.residuals_a.push_back(a);
    fit.residuals_b.push_back(b);
    ca += a * a;
    cb += b * b;
    fit.l2_partial_a.push_back(ca);
    fit.l2_partial_b.push_back(cb);
  }
  return fit;
}

inline nlohmann::json to_json(const AsymptoticFit& f) {
  return {{"C_hat", f.C_hat},
          {"expected_C", f.expected_C},
          {"fit_from", f.fit_from},
          {"residuals_a", f.residuals_a},
          {"residuals_b", f.residuals_b},
          {"l2_partial_a", f.l2_partial_a},
          {"l2_partial_b", f.l2_partial_b}};
}

/// lambda_n = sqrt(dd[n]) as a sine-type sequence (with lambda_0 = 0) and
/// mu_n = sqrt(nd[n]) as a cosine-type sequence, both continued beyond N by
/// the tail constant `c_tail`.
inline std::pair<ZeroSequence, ZeroSequence> sqrt_transform(const SpectrumPair& s, double c_tail) {
  std::vector<double> lam;
  std::vector<double> mu;
  for (std::size_t i = 0; i < s.N; ++i) {
    if (!(s.dd[i] > 0.0) || !(s.nd[i] > 0.0))
      throw ConfigError("sqrt_transform: nonpositive entry at index " + std::to_string(i + 1));
    lam.push_back(std::sqrt(s.dd[i]));
    mu.push_back(std::sqrt(s.nd[i]));
  }
  return {ZeroSequence(std::move(lam), Parity::sine, c_tail), ZeroSequence(std::move(mu), Parity::cosine, c_tail)};
}

inline std::pair<ZeroSequence, ZeroSequence> sqrt_transform(const SpectrumPair& s) {
  return sqrt_transform(s, s.N >= 5 ? asymptotic_fit(s).C_hat : 0.0);
}

/// Weyl function m = A/B.
inline cplx weyl_m(const DeBrangesEvaluator& ev, cplx z) {
  const auto ab = ev(z);
  if (ab.B == cplx(0.0) || std::abs(ab.B) <= 1e-15 * std::abs(ab.A))
    throw NumericalError("weyl_m: evaluation at a pole");
  return ab.A / ab.B;
}

/// Coefficients v_n = -A(mu_n) / B'(mu_n), with B' by a fourth-order central
/// difference.
inline std::vector<double> weyl_coefficients(const DeBrangesEvaluator& ev, const std::vector<double>& mu,
                                             double h = 1e-4) {
  std::vector<double> v;
  for (double m : mu) {
    const double db = (8.0 * (ev.B(m + h) - ev.B(m - h)) - (ev.B(m + 2 * h) - ev.B(m - 2 * h))).real() / (12.0 * h);
    v.push_back(-ev.A(m).real() / db);
  }
  return v;
}

/// m(z) = sum_n v_n 2z / (mu_n^2 - z^2) over the positive zeros mu_n of B.
/// Beyond the supplied terms, mu_n^2 = pi^2 (n - 1/2)^2 + c_tail and v_n = 1;
/// that tail is summed in closed form through tan.
inline cplx weyl_m_series(const std::vector<double>& mu, const std::vector<double>& v, double c_tail, cplx z) {
  if (mu.size() != v.size()) throw ConfigError("weyl_m_series: size mismatch");
  cplx sum = 0.0;
  for (std::size_t n = 0; n < mu.size(); ++n) sum += v[n] * 2.0 * z / (mu[n] * mu[n] - z * z);
  cplx s = std::sqrt(z * z - c_tail);
  if (s.real() < 0) s = -s;
  if (std::abs(s) < 1e-12) return sum;
  // tail = (z/s) * (tan s - sum_{n<=N} 2s/(l_n^2 - s^2)), with the nearest
  // removed pole handled through 1/d - cot d.
  const std::size_t N = mu.size();
  const long m = std::lround(s.real() / pi + 0.5);
  const bool remove = m >= 1 && static_cast<std::size_t>(m) <= N && std::abs(s - pi * (double(m) - 0.5)) < 1.0;
  cplx t = 0.0;
  if (remove) {
    const double ell = pi * (double(m) - 0.5);
    t = cot_regular(s - ell) + 1.0 / (ell + s);
  } else {
    t = std::tan(s);
  }
  for (std::size_t n = 1; n <= N; ++n) {
    if (remove && long(n) == m) continue;
    const double ell = pi * (double(n) - 0.5);
    t -= 2.0 * s / (ell * ell - s * s);
  }
  return sum + (z / s) * t;
}

/// Theta = E# / E.
inline cplx theta(const DeBrangesEvaluator& ev, cplx z) {
  const auto ab = ev(z);
  const cplx e = ab.E();
  if (e == cplx(0.0)) throw NumericalError("theta: E vanishes");
  return (ab.A - I * ab.B) / e;
}

/// Continuous phase phi(x) = atan2(A(x), B(x)) on a grid, i.e. -arg E(x) + pi/2,
/// anchored by phi(0) = 0. Crossings of pi Z are zeros of A and crossings of
/// pi Z + pi/2 are zeros of B.
struct PhaseData {
  std::vector<double> grid;
  std::vector<double> phi;
  std::vector<double> phi_prime;
  double a_const = 0.0;
};

namespace detail {

/// Phase increment from x to y: -arg(E(y)/E(x)).
inline double phase_step(cplx ex, cplx ey) { return -std::arg(ey / ex); }

inline double phase_derivative(const DeBrangesEvaluator& ev, double x, double h = 1e-3) {
  const cplx e0 = ev.E(x);
  const double d1 = phase_step(e0, ev.E(x + h)) - phase_step(e0, ev.E(x - h));
  const double d2 = phase_step(e0, ev.E(x + 2 * h)) - phase_step(e0, ev.E(x - 2 * h));
  return (8.0 * d1 - d2) / (12.0 * h);
}

/// Walk from x0 to x1 accumulating the phase, refining while any increment
/// reaches pi/2.
inline double phase_walk(const DeBrangesEvaluator& ev, double x0, cplx e0, double x1, cplx e1, int depth = 0) {
  const double d = phase_step(e0, e1);
  if (std::abs(d) < pi / 2) return d;
  if (depth > 40) throw NumericalError("phase: unwrap ambiguity near x = " + std::to_string(x0));
  const double xm = 0.5 * (x0 + x1);
  const cplx em = ev.E(xm);
  return phase_walk(ev, x0, e0, xm, em, depth + 1) + phase_walk(ev, xm, em, x1, e1, depth + 1);
}

}  // namespace detail

inline PhaseData phase(const DeBrangesEvaluator& ev, std::vector<double> grid, bool with_derivative = true) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  PhaseData pd;
  pd.grid = grid;
  pd.phi.assign(grid.size(), 0.0);
  if (grid.empty()) return pd;
  const auto ab0 = ev(0.0);
  const cplx e_origin = ab0.E();
  const double phi0 = std::atan2(ab0.A.real(), ab0.B.real());
  std::vector<cplx> e(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) e[i] = ev.E(grid[i]);
  // Start from the node closest to 0 and walk outwards.
  const auto start = static_cast<std::size_t>(
      std::min_element(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      grid.begin());
  pd.phi[start] = phi0 + (grid[start] == 0.0 ? 0.0 : detail::phase_walk(ev, 0.0, e_origin, grid[start], e[start]));
  for (std::size_t i = start + 1; i < grid.size(); ++i)
    pd.phi[i] = pd.phi[i - 1] + detail::phase_walk(ev, grid[i - 1], e[i - 1], grid[i], e[i]);
  for (std::size_t i = start; i-- > 0;)
    pd.phi[i] = pd.phi[i + 1] + detail::phase_walk(ev, grid[i + 1], e[i + 1], grid[i], e[i]);
  if (with_derivative) {
    pd.phi_prime.reserve(grid.size());
    for (double x : grid) pd.phi_prime.push_back(detail::phase_derivative(ev, x));
  }
  return pd;
}

inline std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? a : a + (b - a) * double(i) / double(n - 1);
  return g;
}

/// a in phi'(x) = sum_n |Im z_n| / |x - z_n|^2 + a, estimated as the median of
/// phi' minus the pole sum over the grid.
inline double estimate_a_const(const PhaseData& pd, const std::vector<cplx>& zeros) {
  if (pd.phi_prime.empty()) return 0.0;
  std::vector<double> level;
  for (std::size_t i = 0; i < pd.grid.size(); ++i) {
    double poles = 0.0;
    for (cplx z : zeros) poles += std::abs(z.imag()) / std::norm(pd.grid[i] - z);
    level.push_back(pd.phi_prime[i] - poles);
  }
  std::nth_element(level.begin(), level.begin() + level.size() / 2, level.end());
  return std::max(0.0, level[level.size() / 2]);
}

/// Spectra recovered as crossings of phi with pi Z (lambda_n) and pi Z + pi/2
/// (mu_n) on the positive part of the grid, refined by root finding.
inline SpectrumPair spectra_from_phase(const DeBrangesEvaluator& ev, const PhaseData& pd, double rel_tol = 1e-14) {
  SpectrumPair s;
  auto phase_at = [&](std::size_t i, double x) {
    return pd.phi[i] + detail::phase_walk(ev, pd.grid[i], ev.E(pd.grid[i]), x, ev.E(x));
  };
  for (std::size_t i = 0; i + 1 < pd.grid.size(); ++i) {
    if (pd.grid[i] < 0) continue;
    const double lo = pd.phi[i];
    const double hi = pd.phi[i + 1];
    for (long k = static_cast<long>(std::floor(2.0 * lo / pi)) + 1; k <= std::floor(2.0 * hi / pi); ++k) {
      const double target = 0.5 * pi * double(k);
      if (k <= 0) continue;
      auto f = [&](double x) { return phase_at(i, x) - target; };
      const double x = bracketed_root(f, pd.grid[i], pd.grid[i + 1], lo - target, hi - target, rel_tol);
      (k % 2 == 0 ? s.dd : s.nd).push_back(x * x);
    }
  }
  s.N = std::min(s.dd.size(), s.nd.size());
  s.dd.resize(s.N);
  s.nd.resize(s.N);
  return s;
}

}  // namespace debranges
