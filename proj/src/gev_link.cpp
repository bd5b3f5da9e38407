#include "gev_link.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "errors.hpp"

namespace gevreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double eta, double tau) {
  if (!std::isfinite(eta) || !std::isfinite(tau)) {
    throw Error(ErrorKind::Domain, fmt::format("non-finite input (eta={}, tau={})", eta, tau));
  }
}

// log(1 - tau*eta); only meaningful when the argument is positive.
double log_base(double eta, double tau) { return std::log1p(-tau * eta); }

bool past_boundary(double eta, double tau) { return 1.0 - tau * eta <= 0.0; }

// s = -log(1 - pi), the cumulative hazard at eta. Caller has ruled out the
// boundary.
double hazard(double eta, double tau) {
  if (in_limit_regime(tau)) return std::exp(eta);
  return std::exp(-log_base(eta, tau) / tau);
}

}  // namespace

const char* to_string(TauMode mode) noexcept {
  return mode == TauMode::Fixed ? "fixed" : "profiled";
}

void validate_tau(double tau, double tau_max) {
  if (!std::isfinite(tau) || std::abs(tau) > tau_max) {
    throw Error(ErrorKind::Domain, fmt::format("shape tau={} outside [-{}, {}]", tau, tau_max, tau_max));
  }
}

double response_prob(double eta, double tau) {
  require_finite(eta, tau);
  if (!in_limit_regime(tau) && past_boundary(eta, tau)) return tau > 0.0 ? 1.0 : 0.0;
  return -std::expm1(-hazard(eta, tau));
}

double log_survival(double eta, double tau) {
  require_finite(eta, tau);
  if (!in_limit_regime(tau) && past_boundary(eta, tau)) return tau > 0.0 ? -kInf : 0.0;
  return -hazard(eta, tau);
}

double log_prob(double eta, double tau) {
  require_finite(eta, tau);
  if (!in_limit_regime(tau) && past_boundary(eta, tau)) return tau > 0.0 ? 0.0 : -kInf;
  const double s = hazard(eta, tau);
  if (s == 0.0) return -kInf;
  return std::log(-std::expm1(-s));
}

double link(double pi, double tau) {
  if (!std::isfinite(pi) || !std::isfinite(tau) || !(pi > 0.0 && pi < 1.0)) {
    throw Error(ErrorKind::Domain, fmt::format("link requires 0 < pi < 1 (pi={}, tau={})", pi, tau));
  }
  const double log_hazard = std::log(-std::log1p(-pi));
  if (in_limit_regime(tau)) return log_hazard;
  return -std::expm1(-tau * log_hazard) / tau;
}

double d_prob_d_eta(double eta, double tau) {
  require_finite(eta, tau);
  if (in_limit_regime(tau)) return std::exp(eta - std::exp(eta));
  if (past_boundary(eta, tau)) {
    throw Error(ErrorKind::Derivative,
                fmt::format("derivative undefined on the truncation boundary (eta={}, tau={})", eta, tau));
  }
  const double lb = log_base(eta, tau);
  const double s = std::exp(-lb / tau);
  return std::exp(-s - (1.0 / tau + 1.0) * lb);
}

std::optional<double> d_log_survival_d_eta(double eta, double tau) {
  require_finite(eta, tau);
  if (in_limit_regime(tau)) return -std::exp(eta);
  if (past_boundary(eta, tau)) {
    if (tau > 0.0) return std::nullopt;
    return 0.0;
  }
  // -ds/deta = -u^(-1/tau - 1)
  return -std::exp(-(1.0 / tau + 1.0) * log_base(eta, tau));
}

std::optional<double> d_log_prob_d_eta(double eta, double tau) {
  require_finite(eta, tau);
  double s = 0.0;
  double ds = 0.0;  // ds/deta
  double inv_base = 1.0;
  if (in_limit_regime(tau)) {
    s = std::exp(eta);
    ds = s;
  } else {
    if (past_boundary(eta, tau)) {
      if (tau > 0.0) return 0.0;
      return std::nullopt;
    }
    const double lb = log_base(eta, tau);
    s = std::exp(-lb / tau);
    ds = std::exp(-(1.0 / tau + 1.0) * lb);
    inv_base = std::exp(-lb);
  }
  if (s == 0.0) {
    // expm1(s) ~ s, so the ratio tends to ds/s = 1/u (or 1 in the limit form).
    return inv_base;
  }
  const double r = ds / std::expm1(s);
  if (!std::isfinite(r)) return std::nullopt;
  return r;
}

}  // namespace gevreg
