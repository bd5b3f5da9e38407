#include "simgen.hpp"

#include <cmath>
#include <random>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "errors.hpp"
#include "gev_link.hpp"
#include "random.hpp"

namespace gevreg {

void validate_spec(const SimSpec& spec) {
  if (spec.n < 1) throw Error(ErrorKind::Validation, "simulation needs n >= 1");
  if (spec.beta.size() != spec.covariates.size() + 1) {
    throw Error(ErrorKind::Validation,
                fmt::format("beta has {} entries; expected intercept plus {} covariates", spec.beta.size(),
                            spec.covariates.size()));
  }
  for (double b : spec.beta) {
    if (!std::isfinite(b)) throw Error(ErrorKind::Validation, "beta entries must be finite");
  }
  try {
    validate_tau(spec.tau);
  } catch (const Error& e) {
    throw Error(ErrorKind::Validation, e.what());
  }
  if (spec.response_name.empty()) throw Error(ErrorKind::Validation, "response name is empty");
  std::set<std::string> names{spec.response_name, kInterceptName};
  for (const auto& c : spec.covariates) {
    if (c.name.empty() || !names.insert(c.name).second) {
      throw Error(ErrorKind::Validation, fmt::format("covariate name '{}' is empty or repeated", c.name));
    }
    const bool ok = [&] {
      switch (c.kind) {
        case CovariateKind::Uniform: return std::isfinite(c.a) && std::isfinite(c.b) && c.a < c.b;
        case CovariateKind::Normal: return std::isfinite(c.a) && std::isfinite(c.b) && c.b > 0.0;
        case CovariateKind::Bernoulli: return c.a >= 0.0 && c.a <= 1.0;
        case CovariateKind::Constant: return std::isfinite(c.a);
      }
      return false;
    }();
    if (!ok) throw Error(ErrorKind::Validation, fmt::format("invalid distribution parameters for '{}'", c.name));
  }
}

Dataset simulate_dataset(const SimSpec& spec) {
  validate_spec(spec);
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.beta.size());
  std::mt19937_64 engine(spec.seed);

  Dataset data;
  data.response_name = spec.response_name;
  data.has_intercept = true;
  data.X.resize(n, p);
  data.X.col(0).setOnes();
  data.column_names.emplace_back(kInterceptName);
  for (Eigen::Index j = 1; j < p; ++j) {
    const auto& c = spec.covariates[static_cast<std::size_t>(j - 1)];
    data.column_names.push_back(c.name);
    std::normal_distribution<double> normal(c.a, c.b);
    for (Eigen::Index i = 0; i < n; ++i) {
      switch (c.kind) {
        case CovariateKind::Uniform: data.X(i, j) = c.a + (c.b - c.a) * unit_uniform(engine()); break;
        case CovariateKind::Normal: data.X(i, j) = normal(engine); break;
        case CovariateKind::Bernoulli: data.X(i, j) = unit_uniform(engine()) < c.a ? 1.0 : 0.0; break;
        case CovariateKind::Constant: data.X(i, j) = c.a; break;
      }
    }
  }

  const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(spec.beta.data(), p);
  const Eigen::VectorXd eta = data.X * beta;
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.y[i] = unit_uniform(engine()) < response_prob(eta[i], spec.tau) ? 1.0 : 0.0;
  }
  return data;
}

SimSpec dengue_analog_spec(std::uint64_t seed) {
  SimSpec spec;
  spec.n = 515;
  spec.beta = {0.9947, -0.0456};
  spec.tau = -0.25;
  spec.covariates = {CovariateSpec::uniform("weight", 10.0, 90.0)};
  spec.seed = seed;
  spec.response_name = "infected";
  return spec;
}

SimSpec sim_spec_from_json(const std::string& text) {
  using nlohmann::json;
  SimSpec spec;
  try {
    const json doc = json::parse(text);
    const auto n = doc.at("n").get<long long>();
    if (n < 1) throw Error(ErrorKind::Validation, fmt::format("simulation needs n >= 1, got {}", n));
    spec.n = static_cast<std::size_t>(n);
    spec.beta = doc.at("beta").get<std::vector<double>>();
    spec.tau = doc.value("tau", 0.0);
    spec.seed = doc.value("seed", std::uint64_t{0});
    spec.response_name = doc.value("response", std::string("y"));
    for (const auto& c : doc.value("covariates", json::array())) {
      const auto name = c.at("name").get<std::string>();
      const auto dist = c.at("distribution").get<std::string>();
      if (dist == "uniform") {
        spec.covariates.push_back(CovariateSpec::uniform(name, c.at("a").get<double>(), c.at("b").get<double>()));
      } else if (dist == "normal") {
        spec.covariates.push_back(
            CovariateSpec::normal(name, c.at("mean").get<double>(), c.at("sd").get<double>()));
      } else if (dist == "bernoulli") {
        spec.covariates.push_back(CovariateSpec::bernoulli(name, c.at("q").get<double>()));
      } else if (dist == "constant") {
        spec.covariates.push_back(CovariateSpec::constant(name, c.at("value").get<double>()));
      } else {
        throw Error(ErrorKind::Validation, fmt::format("unknown distribution '{}' for '{}'", dist, name));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, fmt::format("malformed simulation spec: {}", e.what()));
  }
  validate_spec(spec);
  return spec;
}

}  // namespace gevreg
