#include "bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include <fmt/format.h>

namespace gevreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_converged(const FitResult& fit) {
  if (!fit.converged) throw Error(ErrorKind::Inference, "bootstrap requires a converged fit");
}

// ceil(q * B) with a guard against q * B landing a hair above an integer.
std::size_t ceil_rank(double q, std::size_t b) {
  return static_cast<std::size_t>(std::ceil(q * static_cast<double>(b) - 1e-9));
}

struct Replicate {
  Eigen::VectorXd beta;
  Eigen::VectorXd t;
};

std::optional<Replicate> one_replicate(const Dataset& data, const FitResult& fit, std::uint64_t seed,
                                       const FitOptions& options) {
  const Dataset resampled = parametric_resample(fit, data, seed);
  try {
    const FitResult refit = fit_mle(resampled, options);
    if (!refit.converged || !refit.beta.allFinite() || !refit.se.allFinite()) return std::nullopt;
    Replicate rep;
    rep.beta = refit.beta;
    rep.t = (refit.beta - fit.beta).cwiseQuotient(refit.se);
    return rep;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

Dataset parametric_resample(const FitResult& fit, const Dataset& design, std::uint64_t seed) {
  Dataset out = design;
  std::mt19937_64 engine(seed);
  const Eigen::VectorXd eta = design.X * fit.beta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double pi = response_prob(eta[i], fit.tau.value);
    out.y[i] = unit_uniform(engine()) < pi ? 1.0 : 0.0;
  }
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> bootstrap_mean_se(const ReplicateMatrix& reps) {
  const auto b = reps.values.rows();
  if (b < 2) {
    throw Error(ErrorKind::InsufficientReplicates,
                fmt::format("bootstrap mean/SE needs at least 2 successful replicates, have {}", b));
  }
  Eigen::VectorXd mean = reps.values.colwise().mean().transpose();
  const Eigen::MatrixXd centred = reps.values.rowwise() - mean.transpose();
  Eigen::VectorXd se = (centred.colwise().squaredNorm().transpose() / static_cast<double>(b - 1)).array().sqrt();
  return {std::move(mean), std::move(se)};
}

std::vector<Interval> percentile_ci(const ReplicateMatrix& reps, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, fmt::format("alpha={} outside (0,1)", alpha));
  const std::size_t b = reps.effective();
  const auto needed = static_cast<std::size_t>(std::ceil(2.0 / alpha - 1e-9));
  if (b < needed) {
    throw Error(ErrorKind::InsufficientReplicates,
                fmt::format("percentile interval at alpha={} needs at least {} replicates, have {}", alpha, needed, b));
  }
  const std::size_t lo_rank = std::clamp<std::size_t>(ceil_rank(alpha / 2.0, b), 1, b);
  const std::size_t hi_rank = std::clamp<std::size_t>(ceil_rank(1.0 - alpha / 2.0, b), 1, b);
  std::vector<Interval> out;
  std::vector<double> column(b);
  for (Eigen::Index j = 0; j < reps.values.cols(); ++j) {
    for (std::size_t r = 0; r < b; ++r) column[r] = reps.values(static_cast<Eigen::Index>(r), j);
    std::sort(column.begin(), column.end());
    out.push_back({column[lo_rank - 1], column[hi_rank - 1]});
  }
  return out;
}

Eigen::VectorXd bootstrap_p_values(const Eigen::VectorXd& t_obs, const ReplicateMatrix& reps,
                                   std::vector<std::size_t>* exceedances) {
  const std::size_t b = reps.effective();
  if (b == 0) throw Error(ErrorKind::InsufficientReplicates, "no successful bootstrap replicates");
  Eigen::VectorXd p(t_obs.size());
  if (exceedances) exceedances->assign(static_cast<std::size_t>(t_obs.size()), 0);
  for (Eigen::Index j = 0; j < t_obs.size(); ++j) {
    const double threshold = std::abs(t_obs[j]);
    std::size_t count = 0;
    for (Eigen::Index r = 0; r < reps.t_stats.rows(); ++r) {
      if (std::abs(reps.t_stats(r, j)) > threshold) ++count;
    }
    p[j] = static_cast<double>(count) / static_cast<double>(b);
    if (exceedances) (*exceedances)[static_cast<std::size_t>(j)] = count;
  }
  return p;
}

ReplicateMatrix draw_replicates(const Dataset& data, const FitResult& fit, std::size_t replicates,
                                std::uint64_t seed, std::size_t workers, const FitOptions& fit_options) {
  require_converged(fit);
  FitOptions options = fit_options;
  options.tau = fit.tau;
  options.start = fit.beta;

  std::vector<std::optional<Replicate>> slots(replicates);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= replicates) return;
      try {
        slots[b] = one_replicate(data, fit, replicate_seed(seed, b), options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(replicates);
        return;
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(replicates, 1));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  const auto p = fit.beta.size();
  ReplicateMatrix reps;
  reps.requested = replicates;
  std::size_t ok = 0;
  for (const auto& slot : slots) ok += slot.has_value();
  reps.failed = replicates - ok;
  reps.values.resize(static_cast<Eigen::Index>(ok), p);
  reps.t_stats.resize(static_cast<Eigen::Index>(ok), p);
  Eigen::Index row = 0;
  for (std::size_t b = 0; b < replicates; ++b) {
    if (!slots[b]) continue;
    reps.values.row(row) = slots[b]->beta.transpose();
    reps.t_stats.row(row) = slots[b]->t.transpose();
    reps.index.push_back(b);
    ++row;
  }
  return reps;
}

Eigen::VectorXd bootstrap_test(const FitResult& fit, const Dataset& data, std::size_t replicates,
                               std::uint64_t seed, std::size_t workers, const FitOptions& fit_options) {
  require_converged(fit);
  if (replicates < 1) throw Error(ErrorKind::InsufficientReplicates, "bootstrap test needs B >= 1");
  const ReplicateMatrix reps = draw_replicates(data, fit, replicates, seed, workers, fit_options);
  return bootstrap_p_values(fit.beta.cwiseQuotient(fit.se), reps);
}

BootstrapResult summarize(const FitResult& fit, const ReplicateMatrix& reps, double alpha, std::uint64_t seed) {
  BootstrapResult out;
  out.estimate = fit.beta;
  out.seed = seed;
  out.alpha = alpha;
  out.requested = reps.requested;
  out.effective = reps.effective();
  out.failed = reps.failed;
  out.tau = fit.tau;
  out.column_names = fit.column_names;
  out.has_intercept = fit.has_intercept;
  out.t_obs = fit.beta.cwiseQuotient(fit.se);

  auto [mean, se] = bootstrap_mean_se(reps);
  out.mean = std::move(mean);
  out.se = std::move(se);
  out.ci = percentile_ci(reps, alpha);
  out.p_values = bootstrap_p_values(out.t_obs, reps, &out.exceedances);
  return out;
}

BootstrapResult run_bootstrap(const Dataset& data, const FitResult& fit, const BootstrapOptions& options) {
  require_converged(fit);
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorKind::Domain, fmt::format("alpha={} outside (0,1)", options.alpha));
  }
  const ReplicateMatrix reps =
      draw_replicates(data, fit, options.replicates, options.seed, options.workers, options.fit);
  if (reps.reliable()) return summarize(fit, reps, options.alpha, options.seed);

  // Partial result: whatever the surviving replicates support.
  const auto p = fit.beta.size();
  BootstrapResult partial;
  partial.estimate = fit.beta;
  partial.seed = options.seed;
  partial.alpha = options.alpha;
  partial.requested = reps.requested;
  partial.effective = reps.effective();
  partial.failed = reps.failed;
  partial.tau = fit.tau;
  partial.column_names = fit.column_names;
  partial.has_intercept = fit.has_intercept;
  partial.t_obs = fit.beta.cwiseQuotient(fit.se);
  partial.mean = Eigen::VectorXd::Constant(p, kNaN);
  partial.se = Eigen::VectorXd::Constant(p, kNaN);
  partial.ci.assign(static_cast<std::size_t>(p), Interval{kNaN, kNaN});
  partial.p_values = Eigen::VectorXd::Constant(p, kNaN);
  try {
    std::tie(partial.mean, partial.se) = bootstrap_mean_se(reps);
  } catch (const Error&) {
  }
  try {
    partial.ci = percentile_ci(reps, options.alpha);
  } catch (const Error&) {
  }
  try {
    partial.p_values = bootstrap_p_values(partial.t_obs, reps, &partial.exceedances);
  } catch (const Error&) {
  }
  throw UnreliableRunError(fmt::format("{} of {} bootstrap replicates failed (more than 20%)", reps.failed,
                                       reps.requested),
                           std::move(partial));
}

}  // namespace gevreg
