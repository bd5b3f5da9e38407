#include "gevreg/gevreg.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "bootstrap.hpp"
#include "data_io.hpp"
#include "errors.hpp"
#include "gev_link.hpp"
#include "model_fit.hpp"
#include "report.hpp"
#include "simgen.hpp"

struct gevreg_dataset {
  gevreg::Dataset data;
};

struct gevreg_fit {
  gevreg::FitResult fit;
  std::size_t n = 0;
};

struct gevreg_bootstrap {
  gevreg::BootstrapResult result;
  std::optional<std::string> error;
};

namespace {

thread_local std::string last_error;

gevreg_status status_of(gevreg::ErrorKind kind) {
  using gevreg::ErrorKind;
  switch (kind) {
    case ErrorKind::Domain: return GEVREG_ERR_DOMAIN;
    case ErrorKind::Derivative: return GEVREG_ERR_DERIVATIVE;
    case ErrorKind::Validation: return GEVREG_ERR_VALIDATION;
    case ErrorKind::Schema: return GEVREG_ERR_SCHEMA;
    case ErrorKind::Parse: return GEVREG_ERR_PARSE;
    case ErrorKind::Io: return GEVREG_ERR_IO;
    case ErrorKind::Separation: return GEVREG_ERR_SEPARATION;
    case ErrorKind::NonConvergence: return GEVREG_ERR_NONCONVERGENCE;
    case ErrorKind::Inference: return GEVREG_ERR_INFERENCE;
    case ErrorKind::InsufficientReplicates: return GEVREG_ERR_INSUFFICIENT_REPLICATES;
    case ErrorKind::UnreliableRun: return GEVREG_ERR_UNRELIABLE_RUN;
  }
  return GEVREG_ERR_INTERNAL;
}

gevreg_status fail(gevreg_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class F>
gevreg_status guarded(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const gevreg::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GEVREG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GEVREG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GEVREG_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Vec>
gevreg_status copy_out(const Vec& v, double* out, std::size_t len) {
  if (!out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null output buffer");
  if (len < static_cast<std::size_t>(v.size())) {
    return fail(GEVREG_ERR_INVALID_ARGUMENT, "output buffer too small");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
  return GEVREG_OK;
}

template <class F>
gevreg_status scalar(double* out, F&& f) {
  if (!out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] {
    *out = f();
    return GEVREG_OK;
  });
}

std::vector<std::string> names_from(const char* const* names, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < count; ++k) {
    if (!names[k]) throw gevreg::Error(gevreg::ErrorKind::Schema, "null column name");
    out.emplace_back(names[k]);
  }
  return out;
}

gevreg_status emit_dataset(gevreg::Dataset data, gevreg_dataset** out) {
  *out = new gevreg_dataset{std::move(data)};
  return GEVREG_OK;
}

}  // namespace

extern "C" {

const char* gevreg_version(void) { return gevreg::library_version(); }

const char* gevreg_last_error(void) { return last_error.c_str(); }

const char* gevreg_status_name(gevreg_status status) {
  switch (status) {
    case GEVREG_OK: return "ok";
    case GEVREG_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case GEVREG_ERR_DOMAIN: return "domain";
    case GEVREG_ERR_DERIVATIVE: return "derivative";
    case GEVREG_ERR_VALIDATION: return "validation";
    case GEVREG_ERR_SCHEMA: return "schema";
    case GEVREG_ERR_PARSE: return "parse";
    case GEVREG_ERR_IO: return "io";
    case GEVREG_ERR_SEPARATION: return "separation";
    case GEVREG_ERR_NONCONVERGENCE: return "non-convergence";
    case GEVREG_ERR_INFERENCE: return "inference";
    case GEVREG_ERR_INSUFFICIENT_REPLICATES: return "insufficient-replicates";
    case GEVREG_ERR_UNRELIABLE_RUN: return "unreliable-run";
    case GEVREG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void gevreg_string_free(char* s) { std::free(s); }

gevreg_status gevreg_response_prob(double eta, double tau, double* out) {
  return scalar(out, [&] { return gevreg::response_prob(eta, tau); });
}

gevreg_status gevreg_link(double pi, double tau, double* out) {
  return scalar(out, [&] { return gevreg::link(pi, tau); });
}

gevreg_status gevreg_log_survival(double eta, double tau, double* out) {
  return scalar(out, [&] { return gevreg::log_survival(eta, tau); });
}

gevreg_status gevreg_d_prob_d_eta(double eta, double tau, double* out) {
  return scalar(out, [&] { return gevreg::d_prob_d_eta(eta, tau); });
}

gevreg_status gevreg_dataset_read_csv(const char* path, const char* response, const char* const* predictors,
                                      size_t n_predictors, int intercept, gevreg_dataset** out) {
  if (!path || !response || !out || (n_predictors > 0 && !predictors)) {
    return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    gevreg::ColumnSpec spec{response, names_from(predictors, n_predictors), intercept != 0};
    return emit_dataset(gevreg::read_csv(path, spec), out);
  });
}

gevreg_status gevreg_dataset_from_arrays(size_t n, size_t n_predictors, const double* y, const double* x,
                                         const char* const* predictor_names, int intercept,
                                         const char* response_name, gevreg_dataset** out) {
  if (!out || (n > 0 && !y) || (n * n_predictors > 0 && !x) || (n_predictors > 0 && !predictor_names)) {
    return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    std::vector<std::vector<double>> columns(n_predictors, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n_predictors; ++j) columns[j][i] = x[i * n_predictors + j];
    }
    return emit_dataset(gevreg::make_dataset(std::vector<double>(y, y + n), columns,
                                             names_from(predictor_names, n_predictors), intercept != 0,
                                             response_name ? response_name : "y"),
                        out);
  });
}

gevreg_status gevreg_dataset_simulate(const char* spec_json, gevreg_dataset** out) {
  if (!spec_json || !out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return emit_dataset(gevreg::simulate_dataset(gevreg::sim_spec_from_json(spec_json)), out); });
}

gevreg_status gevreg_dataset_dengue_analog(uint64_t seed, gevreg_dataset** out) {
  if (!out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return emit_dataset(gevreg::simulate_dataset(gevreg::dengue_analog_spec(seed)), out); });
}

size_t gevreg_dataset_rows(const gevreg_dataset* data) {
  return data ? static_cast<size_t>(data->data.rows()) : 0;
}

size_t gevreg_dataset_cols(const gevreg_dataset* data) {
  return data ? static_cast<size_t>(data->data.cols()) : 0;
}

double gevreg_dataset_prevalence(const gevreg_dataset* data) {
  if (!data || data->data.rows() == 0) return 0.0;
  return data->data.y.mean();
}

gevreg_status gevreg_dataset_to_csv(const gevreg_dataset* data, char** out) {
  if (!data || !out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = copy_string(gevreg::to_csv(data->data));
    return GEVREG_OK;
  });
}

void gevreg_dataset_free(gevreg_dataset* data) { delete data; }

void gevreg_fit_options_init(gevreg_fit_options* options) {
  if (!options) return;
  const gevreg::FitOptions defaults;
  options->tau_mode = GEVREG_TAU_PROFILED;
  options->tau = 0.0;
  options->max_iter = defaults.max_iter;
  options->grad_tol = defaults.grad_tol;
  options->step_tol = defaults.step_tol;
  options->tau_max = defaults.tau_max;
}

gevreg_status gevreg_fit_mle(const gevreg_dataset* data, const gevreg_fit_options* options, gevreg_fit** out) {
  if (!data || !out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  gevreg_fit_options opts;
  gevreg_fit_options_init(&opts);
  if (options) opts = *options;
  return guarded([&] {
    gevreg::FitOptions fo;
    fo.tau = opts.tau_mode == GEVREG_TAU_FIXED ? gevreg::ShapeTau::fixed(opts.tau)
                                               : gevreg::ShapeTau::profiled(opts.tau);
    fo.max_iter = opts.max_iter;
    fo.grad_tol = opts.grad_tol;
    fo.step_tol = opts.step_tol;
    fo.tau_max = opts.tau_max;
    auto* handle = new gevreg_fit{gevreg::fit_mle(data->data, fo), static_cast<std::size_t>(data->data.rows())};
    *out = handle;
    if (!handle->fit.converged) {
      return fail(GEVREG_ERR_NONCONVERGENCE, "fit did not converge: " + handle->fit.message);
    }
    return GEVREG_OK;
  });
}

size_t gevreg_fit_num_params(const gevreg_fit* fit) { return fit ? static_cast<size_t>(fit->fit.beta.size()) : 0; }

gevreg_status gevreg_fit_coefficients(const gevreg_fit* fit, double* out, size_t len) {
  if (!fit) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null fit");
  return copy_out(fit->fit.beta, out, len);
}

gevreg_status gevreg_fit_std_errors(const gevreg_fit* fit, double* out, size_t len) {
  if (!fit) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null fit");
  return copy_out(fit->fit.se, out, len);
}

gevreg_status gevreg_fit_vcov(const gevreg_fit* fit, double* out, size_t len) {
  if (!fit) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null fit");
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = fit->fit.vcov;
  return copy_out(Eigen::Map<const Eigen::VectorXd>(rm.data(), rm.size()), out, len);
}

double gevreg_fit_tau(const gevreg_fit* fit) { return fit ? fit->fit.tau.value : 0.0; }

gevreg_tau_mode gevreg_fit_tau_mode(const gevreg_fit* fit) {
  return fit && fit->fit.tau.mode == gevreg::TauMode::Fixed ? GEVREG_TAU_FIXED : GEVREG_TAU_PROFILED;
}

double gevreg_fit_loglik(const gevreg_fit* fit) { return fit ? fit->fit.loglik : 0.0; }
int gevreg_fit_converged(const gevreg_fit* fit) { return fit && fit->fit.converged ? 1 : 0; }
int gevreg_fit_iterations(const gevreg_fit* fit) { return fit ? fit->fit.iterations : 0; }
int gevreg_fit_boundary_flag(const gevreg_fit* fit) { return fit && fit->fit.boundary_flag ? 1 : 0; }

gevreg_status gevreg_fit_report(const gevreg_fit* fit, double alpha, gevreg_format format, char** out) {
  if (!fit || !out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!(alpha > 0.0 && alpha < 1.0)) return fail(GEVREG_ERR_INVALID_ARGUMENT, "alpha must lie in (0, 1)");
  return guarded([&] {
    const auto table = gevreg::wald_inference(fit->fit, alpha);
    *out = copy_string(format == GEVREG_FORMAT_JSON ? gevreg::render_fit_json(fit->fit, table, fit->n)
                                                    : gevreg::render_fit_text(fit->fit, table, fit->n));
    return GEVREG_OK;
  });
}

void gevreg_fit_free(gevreg_fit* fit) { delete fit; }

void gevreg_boot_options_init(gevreg_boot_options* options) {
  if (!options) return;
  const gevreg::BootstrapOptions defaults;
  options->replicates = defaults.replicates;
  options->alpha = defaults.alpha;
  options->seed = defaults.seed;
  options->workers = defaults.workers;
}

gevreg_status gevreg_bootstrap_run(const gevreg_dataset* data, const gevreg_fit* fit,
                                   const gevreg_boot_options* options, gevreg_bootstrap** out) {
  if (!data || !fit || !out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  gevreg_boot_options opts;
  gevreg_boot_options_init(&opts);
  if (options) opts = *options;
  return guarded([&] {
    gevreg::BootstrapOptions bo;
    bo.replicates = opts.replicates;
    bo.alpha = opts.alpha;
    bo.seed = opts.seed;
    bo.workers = opts.workers;
    try {
      *out = new gevreg_bootstrap{gevreg::run_bootstrap(data->data, fit->fit, bo), std::nullopt};
      return GEVREG_OK;
    } catch (const gevreg::UnreliableRunError& e) {
      *out = new gevreg_bootstrap{e.partial(), std::string(e.what())};
      return fail(GEVREG_ERR_UNRELIABLE_RUN, e.what());
    }
  });
}

size_t gevreg_bootstrap_requested(const gevreg_bootstrap* boot) { return boot ? boot->result.requested : 0; }
size_t gevreg_bootstrap_effective(const gevreg_bootstrap* boot) { return boot ? boot->result.effective : 0; }
size_t gevreg_bootstrap_failed(const gevreg_bootstrap* boot) { return boot ? boot->result.failed : 0; }

gevreg_status gevreg_bootstrap_mean(const gevreg_bootstrap* boot, double* out, size_t len) {
  if (!boot) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null bootstrap");
  return copy_out(boot->result.mean, out, len);
}

gevreg_status gevreg_bootstrap_std_errors(const gevreg_bootstrap* boot, double* out, size_t len) {
  if (!boot) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null bootstrap");
  return copy_out(boot->result.se, out, len);
}

gevreg_status gevreg_bootstrap_ci(const gevreg_bootstrap* boot, double* low, double* high, size_t len) {
  if (!boot || !low || !high) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  const auto& ci = boot->result.ci;
  if (len < ci.size()) return fail(GEVREG_ERR_INVALID_ARGUMENT, "output buffer too small");
  for (std::size_t j = 0; j < ci.size(); ++j) {
    low[j] = ci[j].low;
    high[j] = ci[j].high;
  }
  return GEVREG_OK;
}

gevreg_status gevreg_bootstrap_p_values(const gevreg_bootstrap* boot, double* out, size_t len) {
  if (!boot) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null bootstrap");
  return copy_out(boot->result.p_values, out, len);
}

gevreg_status gevreg_bootstrap_report(const gevreg_bootstrap* boot, gevreg_format format, char** out) {
  if (!boot || !out) return fail(GEVREG_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = copy_string(format == GEVREG_FORMAT_JSON ? gevreg::render_boot_json(boot->result, boot->error)
                                                    : gevreg::render_boot_text(boot->result));
    return GEVREG_OK;
  });
}

void gevreg_bootstrap_free(gevreg_bootstrap* boot) { delete boot; }

}  // extern "C"
