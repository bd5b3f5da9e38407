#pragma once

// Reference computations used as independent checks. Nothing here calls the
// library's response-curve code.

#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Textbook evaluation in long double, no log1p/expm1 tricks.
inline double gev_response(double eta, double tau) {
  const long double base = 1.0L - static_cast<long double>(tau) * eta;
  if (base <= 0.0L) return tau > 0 ? 1.0 : 0.0;
  const long double s = std::pow(base, -1.0L / static_cast<long double>(tau));
  return static_cast<double>(1.0L - std::exp(-s));
}

/// (log pi, log(1 - pi)) on the interior, in long double. With
/// s = (1 - tau*eta)^(-1/tau): log(1 - pi) = -s and log pi = log(1 - e^-s).
inline std::pair<long double, long double> gev_log_terms(double eta, double tau) {
  const long double s = tau == 0.0 ? std::exp(static_cast<long double>(eta))
                                   : std::pow(1.0L - static_cast<long double>(tau) * eta,
                                              -1.0L / static_cast<long double>(tau));
  return {std::log(-std::expm1(-s)), -s};
}

inline double cloglog_response(double eta) { return -std::expm1(-std::exp(eta)); }

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Golden-section maximiser of a unimodal function on [lo, hi].
inline double maximize_1d(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - r * (hi - lo);
  double b = lo + r * (hi - lo);
  double fa = f(a);
  double fb = f(b);
  while (hi - lo > tol) {
    if (fa >= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - r * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + r * (hi - lo);
      fb = f(b);
    }
  }
  return 0.5 * (lo + hi);
}

/// Brute-force intercept-only Bernoulli log-likelihood under the textbook
/// response curve.
inline double intercept_only_loglik(double beta0, double tau, int ones, int n) {
  const double pi = tau == 0.0 ? cloglog_response(beta0) : gev_response(beta0, tau);
  return ones * std::log(pi) + (n - ones) * std::log1p(-pi);
}

}  // namespace oracle
