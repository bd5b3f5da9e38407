#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace gevreg {

enum class CovariateKind { Uniform, Normal, Bernoulli, Constant };

/// One simulated covariate column.
///   Uniform(a, b), Normal(mean = a, sd = b), Bernoulli(q = a), Constant(a)
struct CovariateSpec {
  std::string name;
  CovariateKind kind = CovariateKind::Uniform;
  double a = 0.0;
  double b = 1.0;

  static CovariateSpec uniform(std::string name, double lo, double hi) {
    return {std::move(name), CovariateKind::Uniform, lo, hi};
  }
  static CovariateSpec normal(std::string name, double mean, double sd) {
    return {std::move(name), CovariateKind::Normal, mean, sd};
  }
  static CovariateSpec bernoulli(std::string name, double q) {
    return {std::move(name), CovariateKind::Bernoulli, q, 0.0};
  }
  static CovariateSpec constant(std::string name, double value) {
    return {std::move(name), CovariateKind::Constant, value, 0.0};
  }
};

struct SimSpec {
  std::size_t n = 0;
  std::vector<double> beta;  // intercept first, then one per covariate
  double tau = 0.0;
  std::vector<CovariateSpec> covariates;
  std::uint64_t seed = 0;
  std::string response_name = "y";
};

void validate_spec(const SimSpec& spec);

/// Draws covariates column by column, then Y_i ~ Bernoulli(pi_i), all from
/// one mt19937_64 seeded with spec.seed.
[[nodiscard]] Dataset simulate_dataset(const SimSpec& spec);

/// Synthetic infection-vs-weight preset: n = 515,
/// weight ~ Uniform(10, 90), beta = (0.9947, -0.0456), tau = -0.25.
[[nodiscard]] SimSpec dengue_analog_spec(std::uint64_t seed);

/// JSON form:
/// {"n": 515, "beta": [..], "tau": -0.25, "seed": 1, "response": "infected",
///  "covariates": [{"name": "weight", "distribution": "uniform", "a": 10, "b": 90}]}
/// normal uses "mean"/"sd", bernoulli "q", constant "value".
[[nodiscard]] SimSpec sim_spec_from_json(const std::string& text);

}  // namespace gevreg
