#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "errors.hpp"
#include "model_fit.hpp"
#include "random.hpp"

namespace gevreg {

/// Replicate estimates in replicate-index order, failed replicates removed.
struct ReplicateMatrix {
  Eigen::MatrixXd values;   // B_effective x p, beta-hat per replicate
  Eigen::MatrixXd t_stats;  // B_effective x p, (beta_b - beta_hat) / se_b
  std::vector<std::size_t> index;  // original replicate number of each row
  std::size_t requested = 0;
  std::size_t failed = 0;

  [[nodiscard]] std::size_t effective() const { return static_cast<std::size_t>(values.rows()); }
  [[nodiscard]] bool reliable() const { return 5 * effective() >= 4 * requested; }
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

struct BootstrapOptions {
  std::size_t replicates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 20240101;
  std::size_t workers = 1;
  /// Optimizer settings for replicate fits. The shape mode and starting
  /// point are taken from the original fit.
  FitOptions fit;
};

struct BootstrapResult {
  Eigen::VectorXd estimate;  // original beta-hat
  Eigen::VectorXd mean;      // bootstrap mean
  Eigen::VectorXd se;        // bootstrap standard error
  std::vector<Interval> ci;
  Eigen::VectorXd t_obs;
  Eigen::VectorXd p_values;
  std::vector<std::size_t> exceedances;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::size_t requested = 0;
  std::size_t effective = 0;
  std::size_t failed = 0;
  ShapeTau tau;
  std::vector<std::string> column_names;
  bool has_intercept = true;
};

/// Thrown when more than 20% of replicates fail. Fields that could not be
/// computed are NaN in the partial result.
class UnreliableRunError : public Error {
 public:
  UnreliableRunError(const std::string& what, BootstrapResult partial)
      : Error(ErrorKind::UnreliableRun, what), partial_(std::move(partial)) {}
  [[nodiscard]] const BootstrapResult& partial() const { return partial_; }

 private:
  BootstrapResult partial_;
};

/// Same X, responses redrawn as Bernoulli(pi-hat_i).
[[nodiscard]] Dataset parametric_resample(const FitResult& fit, const Dataset& design, std::uint64_t seed);

[[nodiscard]] std::pair<Eigen::VectorXd, Eigen::VectorXd> bootstrap_mean_se(const ReplicateMatrix& reps);

/// Order statistics at ranks ceil(alpha/2 * B) and ceil((1 - alpha/2) * B).
[[nodiscard]] std::vector<Interval> percentile_ci(const ReplicateMatrix& reps, double alpha);

/// Exceedance fraction #{|t_b| > |t_obs|} / B_effective per coordinate.
[[nodiscard]] Eigen::VectorXd bootstrap_p_values(const Eigen::VectorXd& t_obs, const ReplicateMatrix& reps,
                                                 std::vector<std::size_t>* exceedances = nullptr);

/// Runs B parametric replicates: resample, refit (warm start at the original
/// estimate, same shape mode), record beta and the centred t statistic.
/// Bit-identical for any worker count.
[[nodiscard]] ReplicateMatrix draw_replicates(const Dataset& data, const FitResult& fit, std::size_t replicates,
                                              std::uint64_t seed, std::size_t workers,
                                              const FitOptions& fit_options = {});

/// Bootstrap p-values for H0: beta_j = 0.
[[nodiscard]] Eigen::VectorXd bootstrap_test(const FitResult& fit, const Dataset& data, std::size_t replicates,
                                             std::uint64_t seed, std::size_t workers = 1,
                                             const FitOptions& fit_options = {});

[[nodiscard]] BootstrapResult run_bootstrap(const Dataset& data, const FitResult& fit,
                                            const BootstrapOptions& options);

/// Assembles the summary from an existing replicate matrix.
[[nodiscard]] BootstrapResult summarize(const FitResult& fit, const ReplicateMatrix& reps, double alpha,
                                        std::uint64_t seed);

}  // namespace gevreg
