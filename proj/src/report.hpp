#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "bootstrap.hpp"
#include "model_fit.hpp"

namespace gevreg {

[[nodiscard]] const char* library_version() noexcept;

/// Four-decimal p-value, "< 0.0001" below 1e-4. A zero bootstrap p-value
/// (no exceedances out of `replicates`) renders as "< 1/B".
[[nodiscard]] std::string format_p_value(std::optional<double> p, std::size_t replicates = 0);

/// "Intercept (beta1)", "weight (beta2)", ...
[[nodiscard]] std::string parameter_label(const std::string& name, std::size_t index);

[[nodiscard]] std::string render_fit_text(const FitResult& fit, const InferenceTable& table, std::size_t n);
[[nodiscard]] std::string render_fit_json(const FitResult& fit, const InferenceTable& table, std::size_t n);

[[nodiscard]] std::string render_boot_text(const BootstrapResult& boot);
/// `error` is set for unreliable runs, whose partial results are still
/// serialised (non-computable fields as null).
[[nodiscard]] std::string render_boot_json(const BootstrapResult& boot,
                                           const std::optional<std::string>& error = std::nullopt);

}  // namespace gevreg
