#pragma once

// Real potentials q on [0, 1] for -u'' + q u = w u.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "debranges/core.hpp"

namespace debranges {

/// Polynomial on [from, to] in powers of (t - from).
struct PolynomialPiece {
  double from = 0.0;
  double to = 1.0;
  std::vector<double> coeffs;

  double operator()(double t) const {
    const double s = t - from;
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
    return acc;
  }

  double integral() const {
    const double len = to - from;
    double acc = 0.0;
    double p = len;
    for (std::size_t j = 0; j < coeffs.size(); ++j, p *= len) acc += coeffs[j] * p / double(j + 1);
    return acc;
  }
};

namespace detail {

inline std::vector<double> parse_numbers(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view item = text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(std::string(item), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || !std::isfinite(value))
      throw ConfigError("malformed number '" + std::string(item) + "' in " + std::string(what));
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

/// A real potential on [0, 1], immutable after construction.
///
/// Three representations are supported: closed-form registry entries
/// ("zero", "const:c", "cos:a,k" for a cos(2 pi k t), "linear:a,b" for a t + b),
/// uniform grid samples with linear or cubic Hermite interpolation, and
/// piecewise polynomials. The stored shift is added to every value; `mean()`
/// is the integral of the unshifted part.
class Potential {
 public:
  enum class Kind { registry, grid, piecewise };

  Potential() : Potential(Registry{Registry::Form::zero, 0.0, 0.0, "zero"}) {}

  static Potential zero() { return Potential(); }

  static Potential from_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    const std::string_view head = spec.substr(0, colon);
    const std::string_view args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    if (head == "zero") {
      if (!args.empty()) throw ConfigError("registry potential 'zero' takes no arguments");
      return Potential();
    }
    if (colon == std::string_view::npos) throw ConfigError("unknown potential '" + std::string(spec) + "'");
    const auto nums = detail::parse_numbers(args, spec);
    if (head == "const" && nums.size() == 1)
      return Potential(Registry{Registry::Form::constant, nums[0], 0.0, std::string(spec)});
    if (head == "cos" && nums.size() == 2)
      return Potential(Registry{Registry::Form::cosine, nums[0], nums[1], std::string(spec)});
    if (head == "linear" && nums.size() == 2)
      return Potential(Registry{Registry::Form::linear, nums[0], nums[1], std::string(spec)});
    throw ConfigError("unknown potential '" + std::string(spec) + "'");
  }

  /// Samples at t_j = j/(n-1); order 1 (linear) or 3 (cubic Hermite).
  static Potential grid(std::vector<double> samples, int order = 1) {
    if (samples.size() < 2) throw ConfigError("grid potential needs at least two samples");
    if (order != 1 && order != 3) throw ConfigError("grid interpolation order must be 1 or 3");
    for (double v : samples)
      if (!std::isfinite(v)) throw ConfigError("grid potential has a non-finite sample");
    return Potential(Grid{std::move(samples), order});
  }

  static Potential piecewise(std::vector<PolynomialPiece> pieces) {
    if (pieces.empty()) throw ConfigError("piecewise potential needs at least one piece");
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.from < b.from; });
    if (pieces.front().from != 0.0 || pieces.back().to != 1.0)
      throw ConfigError("piecewise potential must cover [0, 1] exactly");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const auto& p = pieces[i];
      if (!(p.to > p.from)) throw ConfigError("piecewise potential has an empty piece");
      if (i + 1 < pieces.size() && p.to != pieces[i + 1].from)
        throw ConfigError("piecewise potential pieces must be contiguous");
      if (p.coeffs.empty()) throw ConfigError("piecewise potential piece has no coefficients");
      for (double c : p.coeffs)
        if (!std::isfinite(c)) throw ConfigError("piecewise potential has a non-finite coefficient");
    }
    return Potential(Piecewise{std::move(pieces)});
  }

  static Potential from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("potential JSON needs a 'kind' field");
    const std::string kind = j.at("kind").get<std::string>();
    Potential q;
    try {
      if (kind == "registry") {
        q = from_spec(j.at("name").get<std::string>());
      } else if (kind == "grid") {
        q = grid(j.at("samples").get<std::vector<double>>(), j.value("order", 1));
      } else if (kind == "piecewise") {
        std::vector<PolynomialPiece> pieces;
        for (const auto& p : j.at("pieces"))
          pieces.push_back({p.at("from").get<double>(), p.at("to").get<double>(), p.at("coeffs").get<std::vector<double>>()});
        q = piecewise(std::move(pieces));
      } else {
        throw ConfigError("unknown potential kind '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed potential JSON: ") + e.what());
    }
    return q.with_shift(j.value("shift", 0.0));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    std::visit(
        [&](const auto& rep) {
          using T = std::decay_t<decltype(rep)>;
          if constexpr (std::is_same_v<T, Registry>) {
            j["kind"] = "registry";
            j["name"] = rep.name;
          } else if constexpr (std::is_same_v<T, Grid>) {
            j["kind"] = "grid";
            j["samples"] = rep.samples;
            j["order"] = rep.order;
          } else {
            j["kind"] = "piecewise";
            j["pieces"] = nlohmann::json::array();
            for (const auto& p : rep.pieces) j["pieces"].push_back({{"from", p.from}, {"to", p.to}, {"coeffs", p.coeffs}});
          }
        },
        rep_);
    j["shift"] = shift_;
    return j;
  }

  Kind kind() const { return static_cast<Kind>(rep_.index()); }

  std::string describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& rep) {
          using T = std::decay_t<decltype(rep)>;
          if constexpr (std::is_same_v<T, Registry>) os << rep.name;
          else if constexpr (std::is_same_v<T, Grid>) os << "grid[" << rep.samples.size() << ", order " << rep.order << "]";
          else os << "piecewise[" << rep.pieces.size() << "]";
        },
        rep_);
    if (shift_ != 0.0) os << " + " << shift_;
    return os.str();
  }

  /// Sorted segment boundaries, including 0 and 1. The potential is smooth
  /// inside every segment.
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::size_t segment_count() const { return breakpoints_.size() - 1; }

  /// q(t) + shift, for t inside segment `seg` (endpoints allowed).
  double value_on(std::size_t seg, double t) const {
    return shift_ + std::visit([&](const auto& rep) { return eval(rep, seg, t); }, rep_);
  }

  double operator()(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    auto it = std::upper_bound(breakpoints_.begin() + 1, breakpoints_.end() - 1, t);
    return value_on(static_cast<std::size_t>(it - breakpoints_.begin() - 1), t);
  }

  /// Integral over [0, 1] of the unshifted potential.
  double mean() const { return mean_; }
  double shift() const { return shift_; }
  double total_mean() const { return mean_ + shift_; }

  /// Lower and upper bounds of q + shift on [0, 1].
  std::pair<double, double> bounds() const { return {lo_ + shift_, hi_ + shift_}; }
  double abs_bound() const { return std::max(std::abs(lo_ + shift_), std::abs(hi_ + shift_)); }

  Potential with_shift(double s) const {
    if (!std::isfinite(s)) throw ConfigError("potential shift must be finite");
    Potential q = *this;
    q.shift_ = s;
    return q;
  }

 private:
  struct Registry {
    enum class Form { zero, constant, cosine, linear } form;
    double a;
    double b;
    std::string name;
  };
  struct Grid {
    std::vector<double> samples;
    int order;
  };
  struct Piecewise {
    std::vector<PolynomialPiece> pieces;
  };
  using Rep = std::variant<Registry, Grid, Piecewise>;

  explicit Potential(Rep rep) : rep_(std::move(rep)) {
    std::visit([this](const auto& r) { init(r); }, rep_);
  }

  static double eval(const Registry& r, std::size_t, double t) {
    switch (r.form) {
      case Registry::Form::zero: return 0.0;
      case Registry::Form::constant: return r.a;
      case Registry::Form::cosine: return r.a * std::cos(2.0 * pi * r.b * t);
      case Registry::Form::linear: return r.a * t + r.b;
    }
    return 0.0;
  }

  static double grid_slope(const Grid& g, std::size_t j) {
    const auto& s = g.samples;
    const double h = 1.0 / double(s.size() - 1);
    if (s.size() == 2) return (s[1] - s[0]) / h;
    if (j == 0) return (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
    if (j == s.size() - 1) return (3.0 * s[j] - 4.0 * s[j - 1] + s[j - 2]) / (2.0 * h);
    return (s[j + 1] - s[j - 1]) / (2.0 * h);
  }

  static double eval(const Grid& g, std::size_t seg, double t) {
    const double h = 1.0 / double(g.samples.size() - 1);
    const double x = std::clamp((t - double(seg) * h) / h, 0.0, 1.0);
    const double y0 = g.samples[seg];
    const double y1 = g.samples[seg + 1];
    if (g.order == 1) return y0 + (y1 - y0) * x;
    const double m0 = grid_slope(g, seg) * h;
    const double m1 = grid_slope(g, seg + 1) * h;
    const double x2 = x * x;
    const double x3 = x2 * x;
    return (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * m0 + (-2 * x3 + 3 * x2) * y1 + (x3 - x2) * m1;
  }

  static double eval(const Piecewise& p, std::size_t seg, double t) { return p.pieces[seg](t); }

  void init(const Registry& r) {
    breakpoints_ = {0.0, 1.0};
    switch (r.form) {
      case Registry::Form::zero:
        mean_ = lo_ = hi_ = 0.0;
        break;
      case Registry::Form::constant:
        mean_ = lo_ = hi_ = r.a;
        break;
      case Registry::Form::cosine: {
        const double k = r.b;
        mean_ = (k == 0.0) ? r.a : r.a * std::sin(2.0 * pi * k) / (2.0 * pi * k);
        if (std::abs(k) >= 0.5 || k == 0.0) {
          lo_ = (k == 0.0) ? r.a : -std::abs(r.a);
          hi_ = (k == 0.0) ? r.a : std::abs(r.a);
        } else {
          const double end = r.a * std::cos(2.0 * pi * k);
          lo_ = std::min(r.a, end);
          hi_ = std::max(r.a, end);
        }
        break;
      }
      case Registry::Form::linear:
        mean_ = 0.5 * r.a + r.b;
        lo_ = std::min(r.b, r.a + r.b);
        hi_ = std::max(r.b, r.a + r.b);
        break;
    }
  }

  void init(const Grid& g) {
    const std::size_t n = g.samples.size();
    breakpoints_.resize(n);
    for (std::size_t j = 0; j < n; ++j) breakpoints_[j] = double(j) / double(n - 1);
    breakpoints_.back() = 1.0;
    const double h = 1.0 / double(n - 1);
    mean_ = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      mean_ += 0.5 * h * (g.samples[j] + g.samples[j + 1]);
      if (g.order == 3) mean_ += h * h * (grid_slope(g, j) - grid_slope(g, j + 1)) / 12.0;
    }
    scan_bounds(g.order == 1 ? 1 : 16);
  }

  void init(const Piecewise& p) {
    breakpoints_.clear();
    mean_ = 0.0;
    for (const auto& piece : p.pieces) {
      breakpoints_.push_back(piece.from);
      mean_ += piece.integral();
    }
    breakpoints_.push_back(1.0);
    scan_bounds(64);
  }

  void scan_bounds(int per_segment) {
    lo_ = std::numeric_limits<double>::infinity();
    hi_ = -lo_;
    for (std::size_t s = 0; s + 1 < breakpoints_.size(); ++s) {
      const double a = breakpoints_[s];
      const double b = breakpoints_[s + 1];
      for (int i = 0; i <= per_segment; ++i) {
        const double v = std::visit([&](const auto& rep) { return eval(rep, s, a + (b - a) * i / per_segment); }, rep_);
        lo_ = std::min(lo_, v);
        hi_ = std::max(hi_, v);
      }
    }
    // Sampled extrema of a non-linear segment can miss the true ones slightly.
    if (per_segment > 1) {
      const double pad = 1e-3 * (hi_ - lo_) + 1e-12;
      lo_ -= pad;
      hi_ += pad;
    }
  }

  Rep rep_;
  std::vector<double> breakpoints_;
  double mean_ = 0.0;
  double shift_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

}  // namespace debranges
