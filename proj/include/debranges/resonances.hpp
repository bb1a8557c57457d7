#pragma once

// Complex zeros of E in the lower half-plane: argument-principle counting,
// subdivision search with Newton refinement, certification of the
// logarithmic zero-free strip, and a closed-form fixture.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "debranges/core.hpp"
#include "debranges/schrodinger.hpp"
#include "debranges/spectra.hpp"

namespace debranges {

struct Rect {
  double x0, x1, y0, y1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  cplx centre() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z, double pad = 0.0) const {
    return z.real() >= x0 - pad && z.real() <= x1 + pad && z.imag() >= y0 - pad && z.imag() <= y1 + pad;
  }
  nlohmann::json to_json() const { return {x0, x1, y0, y1}; }
};

struct ArgConfig {
  double max_dphi = pi / 4;   ///< split an edge segment while |Δarg| reaches this
  double initial_step = 0.25; ///< initial edge sampling step
  int max_depth = 40;
  int nudges = 5;             ///< boundary-zero retries
  double nudge_fraction = 1e-3;
};

class BoundaryZeroError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {

using EFn = std::function<cplx(cplx)>;

inline double track_segment(const EFn& E, cplx a, cplx ea, cplx b, cplx eb, const ArgConfig& cfg, int depth) {
  if (ea == cplx(0.0) || eb == cplx(0.0)) throw BoundaryZeroError("E vanishes on a contour");
  const double d = std::arg(eb / ea);
  if (std::abs(d) < cfg.max_dphi) return d;
  if (depth >= cfg.max_depth) throw BoundaryZeroError("argument tracking did not resolve near a contour point");
  const cplx m = 0.5 * (a + b);
  const cplx em = E(m);
  return track_segment(E, a, ea, m, em, cfg, depth + 1) + track_segment(E, m, em, b, eb, cfg, depth + 1);
}

inline double track_edge(const EFn& E, cplx a, cplx b, const ArgConfig& cfg) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / cfg.initial_step)));
  double total = 0.0;
  cplx za = a;
  cplx ea = E(a);
  for (int i = 1; i <= n; ++i) {
    const cplx zb = a + (b - a) * (double(i) / double(n));
    const cplx eb = E(zb);
    total += track_segment(E, za, ea, zb, eb, cfg, 0);
    za = zb;
    ea = eb;
  }
  return total;
}

inline long winding(const EFn& E, const Rect& r, const ArgConfig& cfg) {
  const cplx p0(r.x0, r.y0), p1(r.x1, r.y0), p2(r.x1, r.y1), p3(r.x0, r.y1);
  const double total = track_edge(E, p0, p1, cfg) + track_edge(E, p1, p2, cfg) + track_edge(E, p2, p3, cfg) +
                       track_edge(E, p3, p0, cfg);
  const double turns = total / (2.0 * pi);
  const long n = std::lround(turns);
  if (std::abs(turns - double(n)) > 0.05) throw BoundaryZeroError("non-integer winding number");
  return n;
}

}  // namespace detail

/// Number of zeros of E inside the rectangle by the argument principle.
/// On a boundary zero the rectangle is enlarged slightly and recounted; the
/// rectangle actually used is written to `used` when given.
inline long count_zeros_rect(const std::function<cplx(cplx)>& E, const Rect& rect, const ArgConfig& cfg = {},
                             Rect* used = nullptr) {
  Rect r = rect;
  for (int attempt = 0;; ++attempt) {
    try {
      const long n = detail::winding(E, r, cfg);
      if (used) *used = r;
      return n;
    } catch (const BoundaryZeroError&) {
      if (attempt >= cfg.nudges) throw;
      const double dx = cfg.nudge_fraction * r.width() * double(attempt + 1);
      const double dy = cfg.nudge_fraction * r.height() * double(attempt + 1);
      r = {r.x0 - dx, r.x1 + dx * 0.7, r.y0 - dy * 0.6, r.y1 + dy * 0.9};
    }
  }
}

struct ResonanceRegion {
  double x_max = 60.0;
  double y_min = -8.0;
  double y_max = 0.0;
};

struct Resonance {
  cplx z;
  double residual = 0.0;
  long multiplicity = 1;
};

struct CellCount {
  Rect rect;
  long count = 0;
};

struct ResonanceSet {
  std::vector<Resonance> zeros;  ///< sorted by real part
  std::vector<CellCount> cells;  ///< leaf cells with their winding numbers
  long total_count = 0;
  std::optional<double> strip_C;    ///< max (y_n + log(|x_n| + 2)/2)
  std::optional<double> delta_gap;  ///< distance of the highest zero from the real axis

  nlohmann::json to_json() const {
    nlohmann::json zs = nlohmann::json::array();
    for (const auto& r : zeros)
      zs.push_back({{"x", r.z.real()}, {"y", r.z.imag()}, {"residual", r.residual}, {"multiplicity", r.multiplicity}});
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : cells) cs.push_back({{"rect", c.rect.to_json()}, {"count", c.count}});
    nlohmann::json j{{"zeros", zs}, {"cells", cs}, {"total_count", total_count}};
    j["strip_C"] = strip_C ? nlohmann::json(*strip_C) : nlohmann::json(nullptr);
    j["delta_gap"] = delta_gap ? nlohmann::json(*delta_gap) : nlohmann::json(nullptr);
    return j;
  }
};

struct SearchConfig {
  ArgConfig arg;
  double column_width = 4.0;
  int max_depth = 30;
  double tol = 1e-9;  ///< |E(z_n)| <= tol * max(1, |z_n|)
};

namespace detail {

/// Newton iteration with a central-difference derivative (step scaled to the
/// cell size); returns nothing if it leaves the padded cell or stalls.
inline std::optional<cplx> newton_in_cell(const EFn& E, const Rect& cell, double tol) {
  const double size = std::max(cell.width(), cell.height());
  const double h = std::max(1e-7, 1e-5 * size);
  cplx z = cell.centre();
  for (int it = 0; it < 60; ++it) {
    const cplx e = E(z);
    const cplx de = (E(z + h) - E(z - h)) / (2.0 * h);
    if (de == cplx(0.0)) return std::nullopt;
    const cplx step = e / de;
    z -= step;
    if (!cell.contains(z, 0.25 * size)) return std::nullopt;
    if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) break;
  }
  if (std::abs(E(z)) > tol * std::max(1.0, std::abs(z))) return std::nullopt;
  return z;
}

inline void search_cell(const EFn& E, const Rect& cell, long count, const SearchConfig& cfg, int depth,
                        ResonanceSet& out) {
  if (count == 0) {
    out.cells.push_back({cell, 0});
    return;
  }
  if (count == 1) {
    if (auto z = newton_in_cell(E, cell, cfg.tol); z && cell.contains(*z)) {
      out.cells.push_back({cell, 1});
      out.zeros.push_back({*z, std::abs(E(*z)), 1});
      return;
    }
  }
  const double size = std::max(cell.width(), cell.height());
  if (depth >= cfg.max_depth || size < 1e-7) {
    if (count >= 2) {
      // Unresolvable cluster: treat as one zero of higher multiplicity.
      if (auto z = newton_in_cell(E, cell, 1e-6)) {
        out.cells.push_back({cell, count});
        out.zeros.push_back({*z, std::abs(E(*z)), count});
        return;
      }
    }
    throw NumericalError("find_resonances: cell did not converge at [" + std::to_string(cell.x0) + ", " +
                         std::to_string(cell.x1) + "] x [" + std::to_string(cell.y0) + ", " + std::to_string(cell.y1) +
                         "]");
  }
  // Split the longer side slightly off centre so that symmetric zero pairs
  // do not land on the cut.
  std::vector<Rect> parts;
  if (cell.width() >= cell.height()) {
    const double xm = cell.x0 + 0.4937 * cell.width();
    parts = {{cell.x0, xm, cell.y0, cell.y1}, {xm, cell.x1, cell.y0, cell.y1}};
  } else {
    const double ym = cell.y0 + 0.5063 * cell.height();
    parts = {{cell.x0, cell.x1, cell.y0, ym}, {cell.x0, cell.x1, ym, cell.y1}};
  }
  long sum = 0;
  std::vector<std::pair<Rect, long>> counted;
  for (const auto& p : parts) {
    Rect used = p;
    const long c = count_zeros_rect(E, p, cfg.arg, &used);
    counted.emplace_back(used, c);
    sum += c;
  }
  if (sum != count) {
    // A nudged boundary shifted a zero between parts; recount with an
    // alternative cut.
    const double f = 0.4211;
    if (cell.width() >= cell.height()) {
      const double xm = cell.x0 + f * cell.width();
      parts = {{cell.x0, xm, cell.y0, cell.y1}, {xm, cell.x1, cell.y0, cell.y1}};
    } else {
      const double ym = cell.y0 + f * cell.height();
      parts = {{cell.x0, cell.x1, cell.y0, ym}, {cell.x0, cell.x1, ym, cell.y1}};
    }
    counted.clear();
    sum = 0;
    for (const auto& p : parts) {
      const long c = count_zeros_rect(E, p, cfg.arg);
      counted.emplace_back(p, c);
      sum += c;
    }
    if (sum != count) throw NumericalError("find_resonances: zero count not conserved under subdivision");
  }
  for (const auto& [r, c] : counted) search_cell(E, r, c, cfg, depth + 1, out);
}

}  // namespace detail

inline void finalize_strip(ResonanceSet& set) {
  std::sort(set.zeros.begin(), set.zeros.end(), [](const Resonance& a, const Resonance& b) {
    return a.z.real() < b.z.real() || (a.z.real() == b.z.real() && a.z.imag() < b.z.imag());
  });
  set.total_count = 0;
  for (const auto& r : set.zeros) set.total_count += r.multiplicity;
  set.strip_C.reset();
  set.delta_gap.reset();
  for (const auto& r : set.zeros) {
    const double c = r.z.imag() + 0.5 * std::log(std::abs(r.z.real()) + 2.0);
    set.strip_C = set.strip_C ? std::max(*set.strip_C, c) : c;
    const double gap = -r.z.imag();
    set.delta_gap = set.delta_gap ? std::min(*set.delta_gap, gap) : gap;
  }
}

/// Zeros of E in [-x_max, x_max] x [y_min, y_max] by recursive subdivision
/// driven by argument-principle counts, each refined by Newton's method.
inline ResonanceSet find_resonances(const std::function<cplx(cplx)>& E, const ResonanceRegion& region,
                                    const SearchConfig& cfg = {}) {
  if (!(region.x_max > 0) || !(region.y_min < region.y_max))
    throw ConfigError("find_resonances: region must be bounded and nonempty");
  ResonanceSet set;
  const int columns = std::max(1, static_cast<int>(std::ceil(2.0 * region.x_max / cfg.column_width)));
  for (int c = 0; c < columns; ++c) {
    const double x0 = -region.x_max + 2.0 * region.x_max * double(c) / double(columns);
    const double x1 = -region.x_max + 2.0 * region.x_max * double(c + 1) / double(columns);
    Rect used{x0, x1, region.y_min, region.y_max};
    const long n = count_zeros_rect(E, used, cfg.arg, &used);
    detail::search_cell(E, used, n, cfg, 0, set);
  }
  // Drop duplicates from neighbouring nudged cells.
  std::vector<Resonance> unique;
  for (const auto& r : set.zeros) {
    bool dup = false;
    for (const auto& u : unique) dup = dup || std::abs(u.z - r.z) < 1e-8 * std::max(1.0, std::abs(r.z));
    if (!dup) unique.push_back(r);
  }
  set.zeros = std::move(unique);
  finalize_strip(set);
  return set;
}

inline ResonanceSet find_resonances(const DeBrangesEvaluator& ev, const ResonanceRegion& region,
                                    const SearchConfig& cfg = {}) {
  return find_resonances([&ev](cplx z) { return ev.E(z); }, region, cfg);
}

struct StripCertificate {
  bool certified = false;
  double C = 0.0;
  double x_max = 0.0;
  double sup_phi_prime = 0.0;
  double delta_gap = 0.0;  ///< 1 / sup phi', zero-free band below the real axis
  double eta = 0.0;        ///< rectangles stop at Im z = -eta
  std::vector<CellCount> rectangles;
  std::vector<cplx> violations;  ///< zeros on or above the strip curve

  nlohmann::json to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rectangles) rs.push_back({{"rect", r.rect.to_json()}, {"count", r.count}});
    nlohmann::json vs = nlohmann::json::array();
    for (cplx z : violations) vs.push_back({z.real(), z.imag()});
    return {{"certified", certified}, {"C", C},         {"x_max", x_max},      {"sup_phi_prime", sup_phi_prime},
            {"delta_gap", delta_gap}, {"eta", eta},     {"rectangles", rs},    {"violations", vs}};
  }
};

struct CertifyConfig {
  ArgConfig arg;
  double interval_width = 2.0;
  double phase_step = 0.05;  ///< grid spacing for sup phi'
};

inline double strip_curve(double x, double C) { return -0.5 * std::log(std::abs(x) + 2.0) + C; }

/// sup of phi' on [-x_max, x_max] over a uniform grid.
inline double sup_phase_derivative(const DeBrangesEvaluator& ev, double x_max, double step) {
  const long n = std::max(2L, static_cast<long>(std::ceil(2.0 * x_max / step)) + 1);
  double best = 0.0;
  for (long i = 0; i < n; ++i) {
    const double x = -x_max + 2.0 * x_max * double(i) / double(n - 1);
    best = std::max(best, detail::phase_derivative(ev, x));
  }
  return best;
}

/// Certifies that {-log(|x| + 2)/2 + C <= Im z < 0, |x| <= x_max} has no zeros.
/// The band Im z in [-delta, 0) with delta = 1 / sup phi' is zero-free by the
/// phase-derivative bound; the rest of the region is covered by rectangles
/// from the strip curve up to Im z = -delta/2, each counted by the argument
/// principle. A rectangle with a nonzero count is searched, and only zeros on
/// or above the curve count as violations.
inline StripCertificate certify_strip(const DeBrangesEvaluator& ev, double C, double x_max,
                                      const CertifyConfig& cfg = {}) {
  StripCertificate cert;
  cert.C = C;
  cert.x_max = x_max;
  cert.sup_phi_prime = sup_phase_derivative(ev, x_max, cfg.phase_step);
  if (!(cert.sup_phi_prime > 0)) throw NumericalError("certify_strip: phase derivative is not positive");
  cert.delta_gap = 1.0 / cert.sup_phi_prime;
  cert.eta = 0.5 * cert.delta_gap;
  const std::function<cplx(cplx)> E = [&ev](cplx z) { return ev.E(z); };
  const int n = std::max(1, static_cast<int>(std::ceil(x_max / cfg.interval_width)));
  for (int side = -1; side <= 1; side += 2) {
    for (int i = 0; i < n; ++i) {
      const double a = x_max * double(i) / double(n);
      const double b = x_max * double(i + 1) / double(n);
      const double bottom = strip_curve(b, C);
      const double top = -cert.eta;
      if (bottom >= top) continue;
      Rect r = side > 0 ? Rect{a, b, bottom, top} : Rect{-b, -a, bottom, top};
      const long count = count_zeros_rect(E, r, cfg.arg, &r);
      cert.rectangles.push_back({r, count});
      if (count != 0) {
        ResonanceSet local;
        SearchConfig sc;
        sc.arg = cfg.arg;
        detail::search_cell(E, r, count, sc, 0, local);
        for (const auto& z : local.zeros)
          if (z.z.imag() >= strip_curve(z.z.real(), C)) cert.violations.push_back(z.z);
      }
    }
  }
  cert.certified = cert.violations.empty();
  return cert;
}

/// A(z) = (z^2 - 9 pi^2/16) sin z / (z^2 - pi^2), B(z) = cos z.
struct Remark5Fixture {
  static cplx A(cplx z) {
    // sin z / (z^2 - pi^2) is odd; near +pi it equals -sinc(z - pi)/(z + pi).
    const bool flip = z.real() < 0;
    const cplx w = flip ? -z : z;
    const cplx core = std::abs(w - pi) < 0.5 ? -sinc(w - pi) / (w + pi) : std::sin(w) / (w * w - pi * pi);
    const cplx v = (w * w - 9.0 * pi * pi / 16.0) * core;
    return flip ? -v : v;
  }
  static cplx B(cplx z) { return std::cos(z); }
  static cplx E(cplx z) { return A(z) + I * B(z); }

  static DeBrangesEvaluator evaluator() {
    return DeBrangesEvaluator([](cplx z) { return ABValue{A(z), B(z)}; }, "fixture:remark5");
  }

  /// Pairing value z(A cos z - B sin z) = (7 pi^2/32) z sin 2z / (z^2 - pi^2).
  static cplx pairing(cplx z) {
    const bool flip = z.real() < 0;
    const cplx w = flip ? -z : z;
    const cplx core = std::abs(w - pi) < 0.5 ? 2.0 * sinc(2.0 * (w - pi)) / (w + pi) : std::sin(2.0 * w) / (w * w - pi * pi);
    return 7.0 * pi * pi / 32.0 * w * core;
  }

  /// Theta(z) = E#(z)/E(z) from e^{+-iz} directly.
  static cplx theta(cplx z) {
    const cplx p = 32.0 * z * z - 25.0 * pi * pi;
    const double q = 7.0 * pi * pi;
    return (-p * std::exp(I * z) + q * std::exp(-I * z)) / (p * std::exp(-I * z) - q * std::exp(I * z));
  }

  /// Zero with Re z in (pi k - pi/2, pi k), k >= 1, as the root of
  /// 2iz - Log((32 z^2 - 25 pi^2)/(7 pi^2)) - 2 pi i k by damped Newton. The
  /// equation also vanishes at z = pi, which is not a zero of E; seeds that
  /// land there or outside the branch window are replaced.
  static cplx oracle_zero(long k) {
    if (k < 1) throw ConfigError("oracle_zero: k must be positive");
    auto H = [k](cplx w) {
      return 2.0 * I * w - std::log((32.0 * w * w - 25.0 * pi * pi) / (7.0 * pi * pi)) - 2.0 * pi * I * double(k);
    };
    const double lo = pi * double(k) - 0.5 * pi;
    const double hi = pi * double(k);
    for (double back : {0.3, 1.4, 0.8, 1.1}) {
      const double x0 = hi - back;
      const double y0 = -0.5 * std::log(std::max(32.0 * x0 * x0 / (7.0 * pi * pi), 1.1));
      cplx z(x0, y0);
      for (int it = 0; it < 100; ++it) {
        const cplx h = H(z);
        const cplx dh = 2.0 * I - 64.0 * z / (32.0 * z * z - 25.0 * pi * pi);
        const cplx step = h / dh;
        double damp = 1.0;
        while (damp > 1e-4 && std::abs(H(z - damp * step)) > std::abs(h)) damp *= 0.5;
        z -= damp * step;
        if (std::abs(damp * step) < 1e-15 * std::max(1.0, std::abs(z))) break;
      }
      if (z.real() > lo && z.real() < hi && z.imag() < -1e-6 && std::abs(H(z)) < 1e-12) return z;
    }
    throw NumericalError("oracle_zero: no root in branch " + std::to_string(k));
  }

  /// Oracle zeros with 0 < Re z <= x_max.
  static std::vector<cplx> oracle_zeros(double x_max) {
    std::vector<cplx> out;
    for (long k = 1;; ++k) {
      if (pi * double(k) - 0.5 * pi > x_max) break;
      const cplx z = oracle_zero(k);
      if (z.real() <= x_max) out.push_back(z);
    }
    return out;
  }
};

}  // namespace debranges
