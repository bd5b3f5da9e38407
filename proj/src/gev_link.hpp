#pragma once

// GEV response curve pi = 1 - GEV(-eta; tau) with location 0 and scale 1,
// using the standard CDF convention GEV(z; tau) = exp{-(1 + tau z)_+^(-1/tau)}.
// Writing u = 1 - tau*eta and s = u^(-1/tau):
//
//   pi           = 1 - exp(-s)
//   log(1 - pi)  = -s
//   dpi/deta     = exp(-s) * u^(-1/tau - 1)
//
// and as tau -> 0, s -> exp(eta) (complementary log-log form).

#include <optional>

namespace gevreg {

inline constexpr double kTauSwitch = 1e-6;
inline constexpr double kDefaultTauMax = 5.0;

enum class TauMode { Fixed, Profiled };

/// Shape parameter together with how it is handled by the fitter.
struct ShapeTau {
  double value = 0.0;
  TauMode mode = TauMode::Fixed;

  static ShapeTau fixed(double v) { return {v, TauMode::Fixed}; }
  static ShapeTau profiled(double start = 0.0) { return {start, TauMode::Profiled}; }
};

const char* to_string(TauMode mode) noexcept;

/// Throws Error(Domain) unless tau is finite and |tau| <= tau_max.
void validate_tau(double tau, double tau_max = kDefaultTauMax);

/// True when tau is treated as the log-log limit.
[[nodiscard]] inline bool in_limit_regime(double tau) noexcept {
  return tau > -kTauSwitch && tau < kTauSwitch;
}

[[nodiscard]] double response_prob(double eta, double tau);

/// Inverse of response_prob on 0 < pi < 1.
[[nodiscard]] double link(double pi, double tau);

/// log(1 - pi) evaluated without forming pi. Returns -infinity when pi == 1
/// (tau > 0 with 1 - tau*eta <= 0).
[[nodiscard]] double log_survival(double eta, double tau);

/// log(pi), accurate when pi is tiny. Returns -infinity when pi == 0.
[[nodiscard]] double log_prob(double eta, double tau);

[[nodiscard]] double d_prob_d_eta(double eta, double tau);

/// Slopes of the two Bernoulli log-terms with respect to eta. Past the
/// truncation boundary a term is either locally constant (slope 0) or
/// -infinity (no slope, empty result).
[[nodiscard]] std::optional<double> d_log_prob_d_eta(double eta, double tau);
[[nodiscard]] std::optional<double> d_log_survival_d_eta(double eta, double tau);

}  // namespace gevreg
