#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

namespace gevreg {

namespace {

using nlohmann::ordered_json;

std::string fixed4(double v) {
  if (!std::isfinite(v)) return "NA";
  auto s = fmt::format("{:.4f}", v);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string interval(double lo, double hi) { return fmt::format("[{},{}]", fixed4(lo), fixed4(hi)); }

std::string ci_header(double alpha) {
  const double level = 100.0 * (1.0 - alpha);
  if (std::abs(level - std::round(level)) < 1e-9) return fmt::format("{:.0f}% C.I", level);
  return fmt::format("{:g}% C.I", level);
}

// Parameter column left-aligned, the rest right-aligned.
std::string layout(const std::vector<std::vector<std::string>>& cells) {
  const std::size_t cols = cells.front().size();
  std::vector<std::size_t> width(cols, 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < cols; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::size_t total = 0;
  for (auto w : width) total += w;
  total += 3 * (cols - 1);
  const std::string rule(total, '-');

  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cols; ++c) {
      if (c == 0) {
        line += fmt::format("{:<{}}", cells[r][c], width[c]);
      } else {
        line += fmt::format("   {:>{}}", cells[r][c], width[c]);
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    if (r == 0) out += rule + '\n';
    out += line + '\n';
    if (r == 0) out += rule + '\n';
  }
  out += rule + '\n';
  return out;
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json tau_json(const ShapeTau& tau) {
  return ordered_json{{"value", tau.value}, {"mode", to_string(tau.mode)}};
}

}  // namespace

const char* library_version() noexcept { return GEVREG_VERSION_STRING; }

std::string format_p_value(std::optional<double> p, std::size_t replicates) {
  if (!p) return "";
  if (!std::isfinite(*p)) return "NA";
  if (*p == 0.0 && replicates > 0) {
    const double bound = 1.0 / static_cast<double>(replicates);
    if (bound >= 1e-4) return fmt::format("< {:.4g}", bound);
  }
  if (*p < 1e-4) return "< 0.0001";
  return fixed4(*p);
}

std::string parameter_label(const std::string& name, std::size_t index) {
  return fmt::format("{} (beta{})", name, index + 1);
}

std::string render_fit_text(const FitResult& fit, const InferenceTable& table, std::size_t n) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Parameter", "Estimate", "SE", ci_header(table.alpha), "P-value"});
  for (std::size_t j = 0; j < table.rows.size(); ++j) {
    const auto& row = table.rows[j];
    cells.push_back({parameter_label(row.name, j), fixed4(row.estimate), fixed4(row.se),
                     interval(row.ci_low, row.ci_high), format_p_value(row.p_value)});
  }
  std::string out = "Parameter estimates of GEV regression model\n";
  out += fmt::format("tau = {} ({})\n\n", fixed4(fit.tau.value), to_string(fit.tau.mode));
  out += layout(cells);
  out += fmt::format("n = {}, log-likelihood = {}, iterations = {}, {}\n", n, fixed4(fit.loglik),
                     fit.iterations, fit.converged ? "converged" : "NOT converged");
  if (fit.boundary_flag) out += "note: some observations lie on the truncation boundary\n";
  return out;
}

std::string render_fit_json(const FitResult& fit, const InferenceTable& table, std::size_t n) {
  ordered_json doc;
  doc["command"] = "fit";
  doc["version"] = library_version();
  doc["seed"] = nullptr;
  doc["B"] = nullptr;
  doc["alpha"] = table.alpha;
  doc["tau"] = tau_json(fit.tau);
  doc["n"] = n;
  doc["loglik"] = fit.loglik;
  doc["converged"] = fit.converged;
  doc["iterations"] = fit.iterations;
  doc["score_norm"] = fit.score_norm;
  doc["boundary_flag"] = fit.boundary_flag;
  ordered_json params = ordered_json::array();
  for (const auto& row : table.rows) {
    params.push_back({{"name", row.name},
                      {"estimate", row.estimate},
                      {"se", row.se},
                      {"ci_low", row.ci_low},
                      {"ci_high", row.ci_high},
                      {"z", row.estimate / row.se},
                      {"p_value", row.p_value ? ordered_json(*row.p_value) : ordered_json(nullptr)}});
  }
  doc["parameters"] = std::move(params);
  ordered_json vcov = ordered_json::array();
  for (Eigen::Index i = 0; i < fit.vcov.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (Eigen::Index j = 0; j < fit.vcov.cols(); ++j) r.push_back(number_or_null(fit.vcov(i, j)));
    vcov.push_back(std::move(r));
  }
  doc["vcov"] = std::move(vcov);
  return doc.dump(2) + "\n";
}

std::string render_boot_text(const BootstrapResult& boot) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Parameter", "Estimate", "SE", ci_header(boot.alpha), "P-value"});
  for (std::size_t j = 0; j < boot.column_names.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    const bool is_intercept = boot.has_intercept && j == 0;
    const std::optional<double> p = is_intercept ? std::nullopt : std::optional<double>(boot.p_values[k]);
    cells.push_back({parameter_label(boot.column_names[j], j), fixed4(boot.mean[k]), fixed4(boot.se[k]),
                     interval(boot.ci[j].low, boot.ci[j].high), format_p_value(p, boot.effective)});
  }
  std::string out = "Confidence intervals and p-value by parametric bootstrap\n";
  out += fmt::format("tau = {} ({})\n\n", fixed4(boot.tau.value), to_string(boot.tau.mode));
  out += layout(cells);
  out += fmt::format("B requested = {}, B effective = {} ({} failed), seed = {}\n", boot.requested,
                     boot.effective, boot.failed, boot.seed);
  return out;
}

std::string render_boot_json(const BootstrapResult& boot, const std::optional<std::string>& error) {
  ordered_json doc;
  doc["command"] = "boot";
  doc["version"] = library_version();
  doc["seed"] = boot.seed;
  doc["B"] = boot.requested;
  doc["alpha"] = boot.alpha;
  doc["tau"] = tau_json(boot.tau);
  doc["B_requested"] = boot.requested;
  doc["B_effective"] = boot.effective;
  doc["failed"] = boot.failed;
  doc["reliable"] = !error.has_value();
  if (error) doc["error"] = *error;
  ordered_json params = ordered_json::array();
  for (std::size_t j = 0; j < boot.column_names.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    const bool is_intercept = boot.has_intercept && j == 0;
    ordered_json row{{"name", boot.column_names[j]},
                     {"estimate", number_or_null(boot.estimate[k])},
                     {"bootstrap_mean", number_or_null(boot.mean[k])},
                     {"se", number_or_null(boot.se[k])},
                     {"ci_low", number_or_null(boot.ci[j].low)},
                     {"ci_high", number_or_null(boot.ci[j].high)},
                     {"t_obs", number_or_null(boot.t_obs[k])}};
    row["tested"] = !is_intercept;
    if (!is_intercept && j < boot.exceedances.size()) {
      row["exceedances"] = boot.exceedances[j];
      row["p_value"] = number_or_null(boot.p_values[k]);
    } else {
      row["exceedances"] = nullptr;
      row["p_value"] = nullptr;
    }
    params.push_back(std::move(row));
  }
  doc["parameters"] = std::move(params);
  return doc.dump(2) + "\n";
}

}  // namespace gevreg
