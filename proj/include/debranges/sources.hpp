#pragma once

// Named sources of de Branges functions:
//   q:<potential>        Schrödinger pair for a registry potential (zero, const:c, cos:a,k, linear:a,b)
//   qfile:<path>         Schrödinger pair for a potential stored as JSON
//   fixture:remark5      closed-form pair with logarithmically deep zeros
//   fixture:perturbed    sine product with lambda_1 moved to 1.25 pi, paired with cos
//   zeros:<path>         canonical products from a JSON file {"lambda", "mu", "K_A", "K_B"}

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "debranges/core.hpp"
#include "debranges/potential.hpp"
#include "debranges/products.hpp"
#include "debranges/resonances.hpp"
#include "debranges/schrodinger.hpp"
#include "debranges/zeros.hpp"

namespace debranges {

struct Source {
  std::string spec;
  DeBrangesEvaluator evaluator;
  std::optional<Potential> potential;  ///< after the positivity shift
  std::shared_ptr<const Shooter> shooter;

  nlohmann::json to_json() const {
    nlohmann::json j{{"spec", spec}, {"description", evaluator.description()}};
    if (potential) j["potential"] = potential->to_json();
    return j;
  }
};

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

inline Source source_from_potential(std::string spec, const Potential& q, double tol = 1e-11) {
  const Potential shifted = positivity_shift(q);
  auto sh = std::make_shared<const Shooter>(shifted, tol);
  return Source{std::move(spec), make_evaluator(sh), shifted, sh};
}

/// lambda_1 = 1.25 pi, lambda_n = pi n otherwise; B = cos.
inline DeBrangesEvaluator perturbed_fixture() {
  auto a = std::make_shared<const CanonicalProduct>(ZeroSequence(std::vector<double>{1.25 * pi}, Parity::sine, 0.0), 1.0);
  auto b = std::make_shared<const CanonicalProduct>(ZeroSequence(std::vector<double>{}, Parity::cosine, 0.0), 1.0);
  return make_evaluator(a, b, "fixture:perturbed");
}

inline Source resolve_source(const std::string& spec, double tol = 1e-11) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("source '" + spec + "' lacks a kind prefix");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "q") return source_from_potential(spec, Potential::from_spec(rest), tol);
  if (kind == "qfile") return source_from_potential(spec, Potential::from_json(read_json_file(rest)), tol);
  if (kind == "fixture") {
    if (rest == "remark5") return Source{spec, Remark5Fixture::evaluator(), std::nullopt, nullptr};
    if (rest == "perturbed") return Source{spec, perturbed_fixture(), std::nullopt, nullptr};
    throw ConfigError("unknown fixture '" + rest + "'");
  }
  if (kind == "zeros") {
    const auto j = read_json_file(rest);
    try {
      auto a = std::make_shared<const CanonicalProduct>(ZeroSequence::from_json(j.at("lambda")), j.value("K_A", 1.0));
      auto b = std::make_shared<const CanonicalProduct>(ZeroSequence::from_json(j.at("mu")), j.value("K_B", 1.0));
      if (a->parity() != Parity::sine || b->parity() != Parity::cosine)
        throw ConfigError("zeros file: lambda must be sine type and mu cosine type");
      return Source{spec, make_evaluator(a, b, spec), std::nullopt, nullptr};
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("zeros file: ") + e.what());
    }
  }
  throw ConfigError("unknown source kind '" + kind + "'");
}

}  // namespace debranges
