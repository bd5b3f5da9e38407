// gevreg command-line driver: fit, boot and simulate subcommands on top of
// the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gevreg/gevreg.h"

namespace {

enum ExitCode : int {
  kSuccess = 0,
  kInternal = 1,
  kValidation = 2,
  kSeparation = 3,
  kUnreliable = 4,
};

struct DatasetDeleter {
  void operator()(gevreg_dataset* d) const { gevreg_dataset_free(d); }
};
struct FitDeleter {
  void operator()(gevreg_fit* f) const { gevreg_fit_free(f); }
};
struct BootDeleter {
  void operator()(gevreg_bootstrap* b) const { gevreg_bootstrap_free(b); }
};
struct StringDeleter {
  void operator()(char* s) const { gevreg_string_free(s); }
};
using DatasetPtr = std::unique_ptr<gevreg_dataset, DatasetDeleter>;
using FitPtr = std::unique_ptr<gevreg_fit, FitDeleter>;
using BootPtr = std::unique_ptr<gevreg_bootstrap, BootDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct Config {
  std::string input;
  std::string response;
  std::string predictors;
  bool no_intercept = false;
  std::string tau = "profile";
  std::size_t replicates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 20240101;
  std::size_t workers = 0;
  std::string format = "text";
  std::string out;
  // simulate
  std::string spec;
  std::string preset;
};

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(gevreg_status status) {
  switch (status) {
    case GEVREG_OK: return kSuccess;
    case GEVREG_ERR_SEPARATION:
    case GEVREG_ERR_NONCONVERGENCE: return kSeparation;
    case GEVREG_ERR_UNRELIABLE_RUN: return kUnreliable;
    case GEVREG_ERR_INTERNAL: return kInternal;
    default: return kValidation;
  }
}

void check(gevreg_status status) {
  if (status != GEVREG_OK) {
    throw CliError(exit_code_for(status),
                   std::string(gevreg_status_name(status)) + " error: " + gevreg_last_error());
  }
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw CliError(kValidation, "cannot open output file '" + cfg.out + "'");
  file << text;
}

gevreg_format output_format(const Config& cfg) {
  return cfg.format == "json" ? GEVREG_FORMAT_JSON : GEVREG_FORMAT_TEXT;
}

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw CliError(kValidation, "--alpha must lie in (0, 0.5]");
}

gevreg_fit_options parse_tau(const std::string& text) {
  gevreg_fit_options options;
  gevreg_fit_options_init(&options);
  if (text == "profile") {
    options.tau_mode = GEVREG_TAU_PROFILED;
    return options;
  }
  const std::string prefix = "fixed=";
  if (text.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string value = text.substr(prefix.size());
      options.tau = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw CliError(kValidation, "--tau fixed=<value> needs a number, got '" + text + "'");
    }
    options.tau_mode = GEVREG_TAU_FIXED;
    return options;
  }
  throw CliError(kValidation, "--tau must be 'profile' or 'fixed=<value>', got '" + text + "'");
}

DatasetPtr load(const Config& cfg) {
  if (cfg.input.empty()) throw CliError(kValidation, "--input is required");
  if (cfg.response.empty()) throw CliError(kValidation, "--response is required");
  const auto names = split_list(cfg.predictors);
  std::vector<const char*> raw;
  for (const auto& n : names) raw.push_back(n.c_str());
  gevreg_dataset* data = nullptr;
  check(gevreg_dataset_read_csv(cfg.input.c_str(), cfg.response.c_str(), raw.data(), raw.size(),
                                cfg.no_intercept ? 0 : 1, &data));
  return DatasetPtr(data);
}

FitPtr fit(const Config& cfg, const gevreg_dataset* data) {
  const gevreg_fit_options options = parse_tau(cfg.tau);
  gevreg_fit* raw = nullptr;
  const gevreg_status status = gevreg_fit_mle(data, &options, &raw);
  FitPtr handle(raw);
  check(status);
  return handle;
}

int cmd_fit(const Config& cfg) {
  validate_alpha(cfg.alpha);
  parse_tau(cfg.tau);
  const auto data = load(cfg);
  const auto model = fit(cfg, data.get());
  char* report = nullptr;
  check(gevreg_fit_report(model.get(), cfg.alpha, output_format(cfg), &report));
  emit(cfg, StringPtr(report).get());
  return kSuccess;
}

int cmd_boot(const Config& cfg) {
  validate_alpha(cfg.alpha);
  parse_tau(cfg.tau);
  if (cfg.replicates < 2) {
    throw CliError(kValidation, "--B must be at least 2 (got " + std::to_string(cfg.replicates) + ")");
  }
  const auto data = load(cfg);
  const auto model = fit(cfg, data.get());

  gevreg_boot_options options;
  gevreg_boot_options_init(&options);
  options.replicates = cfg.replicates;
  options.alpha = cfg.alpha;
  options.seed = cfg.seed;
  options.workers = cfg.workers > 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());

  gevreg_bootstrap* raw = nullptr;
  const gevreg_status status = gevreg_bootstrap_run(data.get(), model.get(), &options, &raw);
  BootPtr boot(raw);
  if (status != GEVREG_OK && status != GEVREG_ERR_UNRELIABLE_RUN) check(status);
  const std::string message = status == GEVREG_OK ? "" : gevreg_last_error();

  char* report = nullptr;
  check(gevreg_bootstrap_report(boot.get(), output_format(cfg), &report));
  emit(cfg, StringPtr(report).get());
  if (status == GEVREG_ERR_UNRELIABLE_RUN) {
    std::cerr << "gevreg: unreliable bootstrap run: " << message << "\n";
    return kUnreliable;
  }
  return kSuccess;
}

int cmd_simulate(const Config& cfg, bool seed_given) {
  gevreg_dataset* raw = nullptr;
  if (!cfg.preset.empty()) {
    if (cfg.preset != "dengue") throw CliError(kValidation, "unknown preset '" + cfg.preset + "'");
    check(gevreg_dataset_dengue_analog(cfg.seed, &raw));
  } else if (!cfg.spec.empty()) {
    std::ifstream in(cfg.spec, std::ios::binary);
    if (!in) throw CliError(kValidation, "cannot open spec file '" + cfg.spec + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    if (seed_given) {
      nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
      if (doc.is_discarded() || !doc.is_object()) throw CliError(kValidation, "spec file is not a JSON object");
      doc["seed"] = cfg.seed;
      text = doc.dump();
    }
    check(gevreg_dataset_simulate(text.c_str(), &raw));
  } else {
    throw CliError(kValidation, "simulate needs --spec <file> or --preset dengue");
  }
  DatasetPtr data(raw);
  char* csv = nullptr;
  check(gevreg_dataset_to_csv(data.get(), &csv));
  emit(cfg, StringPtr(csv).get());
  std::fprintf(stderr, "prevalence: %.4f (%zu rows)\n", gevreg_dataset_prevalence(data.get()),
               gevreg_dataset_rows(data.get()));
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary regression with a generalized extreme value link"};
  app.set_version_flag("--version", std::string(gevreg_version()));
  app.require_subcommand(1);

  Config cfg;
  auto add_data_flags = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "CSV file with a header row")->required();
    sub->add_option("--response", cfg.response, "0/1 response column")->required();
    sub->add_option("--predictors", cfg.predictors, "comma-separated predictor columns");
    sub->add_flag("--no-intercept", cfg.no_intercept, "omit the intercept column");
    sub->add_option("--tau", cfg.tau, "shape: 'profile' or 'fixed=<value>'")->capture_default_str();
    sub->add_option("--alpha", cfg.alpha, "1 - confidence level")->capture_default_str();
    sub->add_option("--format", cfg.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.out, "output file (default stdout)");
  };

  auto* fit_cmd = app.add_subcommand("fit", "maximum likelihood fit with Wald inference");
  add_data_flags(fit_cmd);

  auto* boot_cmd = app.add_subcommand("boot", "parametric bootstrap intervals and tests");
  add_data_flags(boot_cmd);
  boot_cmd->add_option("--B", cfg.replicates, "bootstrap replicates")->capture_default_str();
  boot_cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  boot_cmd->add_option("--workers", cfg.workers, "worker threads (default: all cores)");

  auto* sim_cmd = app.add_subcommand("simulate", "simulate a dataset and write it as CSV");
  sim_cmd->add_option("--spec", cfg.spec, "simulation spec (JSON)");
  sim_cmd->add_option("--preset", cfg.preset, "built-in spec: dengue")->check(CLI::IsMember({"dengue"}));
  auto* seed_opt = sim_cmd->add_option("--seed", cfg.seed, "random seed (overrides the spec)");
  sim_cmd->add_option("--out", cfg.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kSuccess : kValidation;
  }

  try {
    if (*fit_cmd) return cmd_fit(cfg);
    if (*boot_cmd) return cmd_boot(cfg);
    if (*sim_cmd) return cmd_simulate(cfg, seed_opt->count() > 0);
  } catch (const CliError& e) {
    std::cerr << "gevreg: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "gevreg: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
