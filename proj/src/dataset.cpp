#include "dataset.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "errors.hpp"

namespace gevreg {

void validate_structure(const Dataset& data) {
  const auto n = data.rows();
  const auto p = data.cols();
  if (p < 1) throw Error(ErrorKind::Validation, "design matrix has no columns");
  if (n < p) throw Error(ErrorKind::Validation, fmt::format("need n >= p, got n={} p={}", n, p));
  if (data.y.size() != n) {
    throw Error(ErrorKind::Validation,
                fmt::format("response length {} does not match {} design rows", data.y.size(), n));
  }
  if (static_cast<Eigen::Index>(data.column_names.size()) != p) {
    throw Error(ErrorKind::Validation, "column_names must have one entry per design column");
  }
  std::set<std::string> seen;
  for (const auto& name : data.column_names) {
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::Validation, fmt::format("duplicate column name '{}'", name));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.y[i] != 0.0 && data.y[i] != 1.0) {
      throw Error(ErrorKind::Validation, fmt::format("response at row {} is not 0 or 1", i + 1));
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!std::isfinite(data.X(i, j))) {
        throw Error(ErrorKind::Validation,
                    fmt::format("non-finite value at row {} column '{}'", i + 1, data.column_names[j]));
      }
    }
  }
}

namespace {

void check_rank(const Dataset& data) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  const auto p = data.cols();
  if (rank == p) return;

  const auto perm = qr.colsPermutation().indices();
  Eigen::MatrixXd basis(data.rows(), rank);
  std::vector<Eigen::Index> basis_cols;
  for (Eigen::Index k = 0; k < rank; ++k) {
    basis.col(k) = data.X.col(perm[k]);
    basis_cols.push_back(perm[k]);
  }
  std::vector<std::string> parts;
  for (Eigen::Index k = rank; k < p; ++k) {
    const auto j = perm[k];
    std::vector<std::string> partners;
    if (rank > 0) {
      const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(data.X.col(j));
      for (Eigen::Index m = 0; m < rank; ++m) {
        if (std::abs(coef[m]) > 1e-8) partners.push_back(fmt::format("'{}'", data.column_names[basis_cols[m]]));
      }
    }
    if (partners.empty()) {
      parts.push_back(fmt::format("'{}' is identically zero", data.column_names[j]));
    } else {
      parts.push_back(fmt::format("'{}' is collinear with {}", data.column_names[j], fmt::join(partners, ", ")));
    }
  }
  throw Error(ErrorKind::Validation,
              fmt::format("design matrix is rank deficient (rank {} < {}): {}", rank, p, fmt::join(parts, "; ")));
}

}  // namespace

void validate_for_fit(const Dataset& data) {
  validate_structure(data);
  const double ones = data.y.sum();
  if (ones == 0.0 || ones == static_cast<double>(data.rows())) {
    throw Error(ErrorKind::Validation, "response must contain both 0 and 1 values");
  }
  check_rank(data);
}

Dataset make_dataset(std::vector<double> y, const std::vector<std::vector<double>>& predictors,
                     std::vector<std::string> predictor_names, bool intercept, std::string response_name) {
  if (predictors.size() != predictor_names.size()) {
    throw Error(ErrorKind::Validation, "one name required per predictor column");
  }
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto offset = intercept ? 1 : 0;
  Dataset data;
  data.response_name = std::move(response_name);
  data.has_intercept = intercept;
  data.y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  data.X.resize(n, static_cast<Eigen::Index>(predictors.size()) + offset);
  if (intercept) {
    data.X.col(0).setOnes();
    data.column_names.emplace_back(kInterceptName);
  }
  for (std::size_t j = 0; j < predictors.size(); ++j) {
    if (static_cast<Eigen::Index>(predictors[j].size()) != n) {
      throw Error(ErrorKind::Validation, fmt::format("predictor '{}' has wrong length", predictor_names[j]));
    }
    data.X.col(static_cast<Eigen::Index>(j) + offset) =
        Eigen::Map<const Eigen::VectorXd>(predictors[j].data(), n);
    data.column_names.push_back(std::move(predictor_names[j]));
  }
  validate_structure(data);
  return data;
}

}  // namespace gevreg
