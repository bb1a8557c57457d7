#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "debranges/core.hpp"

namespace debranges {

/// Sine type: zeros near pi n, including 0. Cosine type: zeros near pi (n - 1/2).
enum class Parity { sine, cosine };

inline const char* to_string(Parity p) { return p == Parity::sine ? "sine" : "cosine"; }

/// Lattice point pi n (sine type) or pi (n - 1/2) (cosine type), n >= 1.
inline double lattice_point(Parity p, long n) { return p == Parity::sine ? pi * double(n) : pi * (double(n) - 0.5); }

/// Symmetric real zero sequence stored by its positive part nu_1 < ... < nu_N.
/// Beyond N the zeros follow nu_n^2 = l_n^2 + c_tail, with l_n the lattice point.
class ZeroSequence {
 public:
  ZeroSequence() = default;

  ZeroSequence(std::vector<double> positive, Parity parity, double c_tail = 0.0)
      : nu_(std::move(positive)), parity_(parity), c_tail_(c_tail) {
    if (!std::isfinite(c_tail_)) throw ConfigError("ZeroSequence: tail constant must be finite");
    for (std::size_t i = 0; i < nu_.size(); ++i) {
      if (!std::isfinite(nu_[i]) || nu_[i] <= 0.0) throw ConfigError("ZeroSequence: entries must be positive and finite");
      if (i > 0 && !(nu_[i] > nu_[i - 1])) throw ConfigError("ZeroSequence: entries must increase strictly");
    }
    const double l = lattice_point(parity_, static_cast<long>(nu_.size()) + 1);
    if (l * l + c_tail_ <= 0.0) throw ConfigError("ZeroSequence: tail model has nonpositive squares");
  }

  /// The lattice itself: pi n or pi (n - 1/2), N terms, exact tail.
  static ZeroSequence lattice(Parity parity, std::size_t N) {
    std::vector<double> v;
    for (std::size_t n = 1; n <= N; ++n) v.push_back(lattice_point(parity, long(n)));
    return ZeroSequence(std::move(v), parity, 0.0);
  }

  const std::vector<double>& positive() const { return nu_; }
  std::size_t size() const { return nu_.size(); }
  Parity parity() const { return parity_; }
  double c_tail() const { return c_tail_; }
  double lattice(long n) const { return lattice_point(parity_, n); }

  /// nu_n for any n >= 1, from the stored entries or the tail model.
  double value(long n) const {
    if (n >= 1 && static_cast<std::size_t>(n) <= nu_.size()) return nu_[n - 1];
    const double l = lattice(n);
    return std::sqrt(l * l + c_tail_);
  }

  /// All entries -nu_N, ..., (0,) ..., nu_N in increasing order.
  std::vector<double> symmetric() const {
    std::vector<double> out;
    for (auto it = nu_.rbegin(); it != nu_.rend(); ++it) out.push_back(-*it);
    if (parity_ == Parity::sine) out.push_back(0.0);
    out.insert(out.end(), nu_.begin(), nu_.end());
    return out;
  }

  double max_lattice_deviation() const {
    double m = 0.0;
    for (std::size_t n = 1; n <= nu_.size(); ++n) m = std::max(m, std::abs(nu_[n - 1] - lattice(long(n))));
    return m;
  }

  /// Distance from real or complex z to the nearest zero, tail included.
  double distance(cplx z) const {
    const double x = std::abs(z.real());
    double best = parity_ == Parity::sine ? std::abs(z) : std::numeric_limits<double>::infinity();
    const long guess = std::max(1L, std::lround(x / pi + (parity_ == Parity::sine ? 0.0 : 0.5)));
    for (long n = std::max(1L, guess - 3); n <= guess + 3; ++n) {
      const double nu = value(n);
      best = std::min(best, std::abs(cplx(x, z.imag()) - nu));
    }
    if (!nu_.empty() && x < nu_.back() + pi) {
      for (double nu : nu_) best = std::min(best, std::abs(cplx(x, z.imag()) - nu));
    }
    return best;
  }

  nlohmann::json to_json() const {
    return {{"parity", to_string(parity_)}, {"entries", nu_}, {"tail_model", {{"C_tail", c_tail_}}}};
  }

  static ZeroSequence from_json(const nlohmann::json& j) {
    try {
      const std::string p = j.at("parity").get<std::string>();
      if (p != "sine" && p != "cosine") throw ConfigError("ZeroSequence: parity must be 'sine' or 'cosine'");
      double c = 0.0;
      if (j.contains("tail_model")) c = j.at("tail_model").value("C_tail", 0.0);
      return ZeroSequence(j.at("entries").get<std::vector<double>>(), p == "sine" ? Parity::sine : Parity::cosine, c);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed zero sequence JSON: ") + e.what());
    }
  }

 private:
  std::vector<double> nu_;
  Parity parity_ = Parity::sine;
  double c_tail_ = 0.0;
};

}  // namespace debranges
