#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gevreg {

/// Binary response plus design matrix. Column 0 is the all-ones intercept
/// column when has_intercept is set.
struct Dataset {
  Eigen::VectorXd y;  // n labels, each exactly 0.0 or 1.0
  Eigen::MatrixXd X;  // n x p
  std::vector<std::string> column_names;
  std::string response_name = "y";
  bool has_intercept = true;

  [[nodiscard]] Eigen::Index rows() const { return X.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return X.cols(); }
};

inline constexpr const char* kInterceptName = "Intercept";

/// Shape checks: n >= p >= 1, finite entries, binary labels, names match.
void validate_structure(const Dataset& data);

/// Everything validate_structure checks, plus both classes present and a
/// full-rank design. Rank deficiency reports the collinear columns.
void validate_for_fit(const Dataset& data);

/// Builds a Dataset from raw columns, prepending the intercept if requested.
Dataset make_dataset(std::vector<double> y, const std::vector<std::vector<double>>& predictors,
                     std::vector<std::string> predictor_names, bool intercept,
                     std::string response_name = "y");

}  // namespace gevreg
