#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "gev_link.hpp"

namespace gevreg {

struct FitOptions {
  ShapeTau tau = ShapeTau::profiled();
  int max_iter = 200;
  double grad_tol = 1e-6;
  double step_tol = 1e-10;
  double tau_max = kDefaultTauMax;
  int profile_grid_points = 41;
  double profile_tol = 1e-5;       // golden-section bracket width in tau
  double separation_norm = 1e4;    // ||beta|| beyond this counts as divergence
  /// Starting coefficients; zero when empty. In profiled mode the grid walk
  /// starts at the grid point nearest tau.value.
  std::optional<Eigen::VectorXd> start;
};

struct FitResult {
  Eigen::VectorXd beta;
  ShapeTau tau;
  double loglik = 0.0;
  Eigen::VectorXd se;
  Eigen::MatrixXd vcov;
  bool converged = false;
  int iterations = 0;
  bool boundary_flag = false;
  double score_norm = 0.0;  // ||score||_inf at beta
  std::vector<std::string> column_names;
  bool has_intercept = true;
  std::string message;  // diagnostic for non-converged fits
};

/// Bernoulli log-likelihood; -infinity for an impossible observation.
[[nodiscard]] double log_likelihood(const Dataset& data, const Eigen::VectorXd& beta, double tau);

/// Gradient of log_likelihood in beta. Throws Error(Derivative) when an
/// observation sits on the wrong side of the truncation boundary.
[[nodiscard]] Eigen::VectorXd score(const Dataset& data, const Eigen::VectorXd& beta, double tau);

/// Maximum likelihood fit. Throws Error(Validation) for unusable data and
/// Error(Separation) when the MLE does not exist; returns converged=false
/// when the iteration budget runs out or the curvature is degenerate.
[[nodiscard]] FitResult fit_mle(const Dataset& data, const FitOptions& options = {});

struct InferenceRow {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::optional<double> p_value;
};

struct InferenceTable {
  std::vector<InferenceRow> rows;
  double alpha = 0.05;
};

/// Two-sided standard normal quantile z(1 - alpha/2).
[[nodiscard]] double normal_critical_value(double alpha);
/// Two-sided p-value of a z statistic.
[[nodiscard]] double normal_two_sided_p(double z);

/// Wald intervals and tests. The intercept row carries no p-value unless
/// test_intercept is set.
[[nodiscard]] InferenceTable wald_inference(const FitResult& fit, double alpha, bool test_intercept = false);

}  // namespace gevreg
