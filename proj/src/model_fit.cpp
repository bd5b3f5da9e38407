#include "model_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "errors.hpp"

namespace gevreg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

double loglik_from_eta(const Eigen::VectorXd& y, const Eigen::VectorXd& eta, double tau) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double term = y[i] == 1.0 ? log_prob(eta[i], tau) : log_survival(eta[i], tau);
    if (term == kNegInf) return kNegInf;
    total += term;
  }
  return total;
}

// Per-observation d(log-term)/d(eta); false when any slope is undefined.
bool slopes_from_eta(const Eigen::VectorXd& y, const Eigen::VectorXd& eta, double tau, Eigen::VectorXd& out) {
  out.resize(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const auto slope = y[i] == 1.0 ? d_log_prob_d_eta(eta[i], tau) : d_log_survival_d_eta(eta[i], tau);
    if (!slope) return false;
    out[i] = *slope;
  }
  return true;
}

std::optional<Eigen::VectorXd> try_score(const Dataset& data, const Eigen::VectorXd& beta, double tau) {
  const Eigen::VectorXd eta = data.X * beta;
  Eigen::VectorXd w;
  if (!slopes_from_eta(data.y, eta, tau, w)) return std::nullopt;
  Eigen::VectorXd g = data.X.transpose() * w;
  if (!g.allFinite()) return std::nullopt;
  return g;
}

// Negative Hessian of the log-likelihood by central differences of the
// analytic score. The step for column j is 1e-5 * max(1, |beta_j|), capped so
// that no observation's 1 - tau*eta moves by more than a tenth of its distance
// to the truncation kink (the curvature there is unbounded for tau < -1/2).
std::optional<Eigen::MatrixXd> negative_hessian(const Dataset& data, const Eigen::VectorXd& beta, double tau) {
  const auto p = beta.size();
  const Eigen::VectorXd eta = data.X * beta;
  Eigen::MatrixXd h(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double step = 1e-5 * std::max(1.0, std::abs(beta[j]));
    if (!in_limit_regime(tau)) {
      for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double reach = std::abs(tau * data.X(i, j));
        if (reach == 0.0) continue;
        const double gap = std::abs(1.0 - tau * eta[i]);
        step = std::min(step, 0.1 * gap / reach);
      }
    }
    if (!(step > 1e-12 * std::max(1.0, std::abs(beta[j])))) return std::nullopt;
    Eigen::VectorXd up = beta;
    Eigen::VectorXd down = beta;
    up[j] += step;
    down[j] -= step;
    const auto g_up = try_score(data, up, tau);
    const auto g_down = try_score(data, down, tau);
    if (!g_up || !g_down) return std::nullopt;
    h.col(j) = -(*g_up - *g_down) / (2.0 * step);
  }
  return Eigen::MatrixXd(0.5 * (h + h.transpose()));
}

std::optional<Eigen::MatrixXd> inverse_if_pd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  if (!inv.allFinite()) return std::nullopt;
  return inv;
}

struct InnerFit {
  Eigen::VectorXd beta;
  double loglik = kNegInf;
  Eigen::VectorXd grad;
  bool converged = false;
  int iterations = 0;
  std::string message;
};

Eigen::MatrixXd initial_inverse_curvature(const Dataset& data, const Eigen::VectorXd& beta, double tau) {
  if (auto h = negative_hessian(data, beta, tau)) {
    if (auto inv = inverse_if_pd(*h)) return *inv;
  }
  return Eigen::MatrixXd::Identity(beta.size(), beta.size());
}

// BFGS ascent on the log-likelihood at fixed tau with backtracking. Steps
// that leave the support (log-likelihood -inf or undefined score) are
// halved away.
InnerFit maximize_at_tau(const Dataset& data, double tau, Eigen::VectorXd beta, const FitOptions& opt) {
  const auto p = data.cols();
  if (beta.size() != p) beta = Eigen::VectorXd::Zero(p);

  double ll = log_likelihood(data, beta, tau);
  auto g = std::isfinite(ll) ? try_score(data, beta, tau) : std::nullopt;
  if (!g) {
    // eta = 0 is interior for every tau.
    beta.setZero();
    ll = log_likelihood(data, beta, tau);
    g = try_score(data, beta, tau);
    if (!g) throw Error(ErrorKind::NonConvergence, "no feasible starting point");
  }

  InnerFit out;
  const double flat_tol = 32.0 * kEps * (std::abs(ll) + static_cast<double>(data.rows()));
  Eigen::VectorXd grad = *g;
  Eigen::MatrixXd hinv = initial_inverse_curvature(data, beta, tau);
  bool just_reset = true;
  // On very flat likelihoods a small gradient still leaves beta loose, so a
  // few polishing steps run after the gradient test passes.
  constexpr int kMaxPolish = 10;
  int polish = 0;
  std::optional<InnerFit> last_converged;
  int iter = 0;
  for (; iter < opt.max_iter; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      last_converged = InnerFit{beta, ll, grad, true, iter, {}};
      const double newton = (hinv * grad).lpNorm<Eigen::Infinity>();
      if (polish >= kMaxPolish || newton <= 1e-10 * (1.0 + beta.lpNorm<Eigen::Infinity>())) break;
      ++polish;
    }

    Eigen::VectorXd dir = hinv * grad;
    double slope = grad.dot(dir);
    if (!(slope > 0.0)) {
      hinv = initial_inverse_curvature(data, beta, tau);
      dir = hinv * grad;
      slope = grad.dot(dir);
      if (!(slope > 0.0)) {
        hinv.setIdentity();
        dir = grad;
        slope = grad.squaredNorm();
      }
    }

    const double grad_norm = grad.lpNorm<Eigen::Infinity>();
    const double dir_norm = dir.lpNorm<Eigen::Infinity>();
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd next;
    Eigen::VectorXd next_grad;
    double next_ll = kNegInf;
    // The full step is always tried; step_tol only bounds backtracking.
    do {
      next = beta + t * dir;
      next_ll = log_likelihood(data, next, tau);
      if (std::isfinite(next_ll)) {
        const bool armijo = next_ll >= ll + 1e-4 * t * slope;
        // Near the optimum the decrease drowns in rounding of the sum; accept
        // a flat step if it still shrinks the gradient.
        const bool flat = next_ll >= ll - flat_tol;
        if (armijo || flat) {
          if (auto ng = try_score(data, next, tau)) {
            if (armijo || ng->lpNorm<Eigen::Infinity>() < grad_norm) {
              next_grad = std::move(*ng);
              accepted = true;
              break;
            }
          }
        }
      }
      t *= 0.5;
    } while (t * dir_norm >= opt.step_tol);

    if (!accepted) {
      if (just_reset) {
        out.message = "line search stalled";
        break;
      }
      hinv = initial_inverse_curvature(data, beta, tau);
      just_reset = true;
      continue;
    }
    just_reset = false;

    const Eigen::VectorXd s = next - beta;
    const Eigen::VectorXd yv = grad - next_grad;  // gradient change of -loglik
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(p, p);
      const Eigen::MatrixXd left = ident - rho * s * yv.transpose();
      hinv = left * hinv * left.transpose() + rho * s * s.transpose();
    }

    beta = std::move(next);
    ll = next_ll;
    grad = std::move(next_grad);

    if (beta.norm() > opt.separation_norm) {
      throw Error(ErrorKind::Separation,
                  fmt::format("coefficients diverge (||beta|| > {:g}) while the likelihood keeps increasing; "
                              "the data appear to be separated",
                              opt.separation_norm));
    }
  }

  if (grad.lpNorm<Eigen::Infinity>() >= opt.grad_tol && last_converged) {
    return *last_converged;
  }
  out.beta = std::move(beta);
  out.loglik = ll;
  out.grad = std::move(grad);
  out.iterations = iter;
  out.converged = out.grad.lpNorm<Eigen::Infinity>() < opt.grad_tol;
  if (!out.converged && out.message.empty()) {
    out.message = fmt::format("gradient norm {:.3g} above tolerance after {} iterations",
                              out.grad.lpNorm<Eigen::Infinity>(), iter);
  }
  return out;
}

// At a stationary point reached from `start`, the likelihood must drop when
// continuing along the path travelled. Under separation it keeps rising.
void check_ray(const Dataset& data, double tau, const Eigen::VectorXd& start, const InnerFit& fit) {
  const Eigen::VectorXd travelled = fit.beta - start;
  if (travelled.norm() <= 1e-8 * std::max(1.0, fit.beta.norm())) return;
  const double ahead = log_likelihood(data, fit.beta + travelled, tau);
  if (ahead > fit.loglik + 1e-11 * (1.0 + std::abs(fit.loglik))) {
    throw Error(ErrorKind::Separation,
                "the likelihood increases without bound along the fitted direction; "
                "the data appear to be separated");
  }
}

InnerFit fit_fixed(const Dataset& data, double tau, const Eigen::VectorXd& start, const FitOptions& opt) {
  InnerFit fit = maximize_at_tau(data, tau, start, opt);
  if (fit.converged) check_ray(data, tau, start.size() == fit.beta.size() ? start : Eigen::VectorXd::Zero(fit.beta.size()), fit);
  return fit;
}

struct ProfilePoint {
  double tau = 0.0;
  InnerFit fit;
};

ProfilePoint profile_tau(const Dataset& data, const Eigen::VectorXd& start, const FitOptions& opt) {
  const int points = std::max(3, opt.profile_grid_points);
  const double tmax = opt.tau_max;
  const double spacing = 2.0 * tmax / (points - 1);
  auto grid_tau = [&](int k) {
    const double t = -tmax + spacing * k;
    return std::abs(t) < 1e-12 ? 0.0 : t;
  };

  const int first = std::clamp(static_cast<int>(std::lround((opt.tau.value + tmax) / spacing)), 0, points - 1);
  std::vector<InnerFit> grid(points);
  grid[first] = fit_fixed(data, grid_tau(first), start, opt);  // separation propagates

  auto walk = [&](int from, int to, int step) {
    Eigen::VectorXd warm = grid[from].beta;
    for (int k = from + step; k != to + step; k += step) {
      try {
        grid[k] = fit_fixed(data, grid_tau(k), warm, opt);
        warm = grid[k].beta;
      } catch (const Error&) {
        grid[k] = InnerFit{};
      }
    }
  };
  if (first < points - 1) walk(first, points - 1, +1);
  if (first > 0) walk(first, 0, -1);

  int best = first;
  for (int k = 0; k < points; ++k) {
    if (grid[k].loglik > grid[best].loglik) best = k;
  }

  ProfilePoint best_point{grid_tau(best), grid[best]};
  const Eigen::VectorXd warm = grid[best].beta;
  auto evaluate = [&](double tau) {
    try {
      InnerFit f = fit_fixed(data, tau, warm, opt);
      if (f.loglik > best_point.fit.loglik) best_point = ProfilePoint{tau, f};
      return f.loglik;
    } catch (const Error&) {
      return kNegInf;
    }
  };

  // Golden-section refinement over the neighbouring grid cells.
  double lo = grid_tau(std::max(best - 1, 0));
  double hi = grid_tau(std::min(best + 1, points - 1));
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - ratio * (hi - lo);
  double b = lo + ratio * (hi - lo);
  double fa = evaluate(a);
  double fb = evaluate(b);
  while (hi - lo > opt.profile_tol) {
    if (fa >= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = evaluate(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = evaluate(b);
    }
  }
  return best_point;
}

FitResult finalize(const Dataset& data, ShapeTau tau, InnerFit inner) {
  FitResult out;
  out.tau = tau;
  out.beta = std::move(inner.beta);
  out.loglik = inner.loglik;
  out.iterations = inner.iterations;
  out.converged = inner.converged;
  out.message = std::move(inner.message);
  out.score_norm = inner.grad.lpNorm<Eigen::Infinity>();
  out.column_names = data.column_names;
  out.has_intercept = data.has_intercept;

  const Eigen::VectorXd eta = data.X * out.beta;
  if (!in_limit_regime(tau.value)) {
    out.boundary_flag = ((1.0 - tau.value * eta.array()) <= 0.0).any();
  }

  const auto p = out.beta.size();
  out.vcov = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
  out.se = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  const auto h = negative_hessian(data, out.beta, tau.value);
  const auto inv = h ? inverse_if_pd(*h) : std::nullopt;
  if (!inv) {
    out.converged = false;
    if (out.message.empty()) out.message = "observed information is not positive definite";
    return out;
  }
  out.vcov = 0.5 * (*inv + inv->transpose());
  out.se = out.vcov.diagonal().array().sqrt();
  return out;
}

}  // namespace

double log_likelihood(const Dataset& data, const Eigen::VectorXd& beta, double tau) {
  if (beta.size() != data.cols()) {
    throw Error(ErrorKind::Validation,
                fmt::format("coefficient vector has length {}, design has {} columns", beta.size(), data.cols()));
  }
  return loglik_from_eta(data.y, data.X * beta, tau);
}

Eigen::VectorXd score(const Dataset& data, const Eigen::VectorXd& beta, double tau) {
  if (beta.size() != data.cols()) {
    throw Error(ErrorKind::Validation,
                fmt::format("coefficient vector has length {}, design has {} columns", beta.size(), data.cols()));
  }
  auto g = try_score(data, beta, tau);
  if (!g) throw Error(ErrorKind::Derivative, "score undefined: an observation lies on the truncation boundary");
  return *g;
}

FitResult fit_mle(const Dataset& data, const FitOptions& options) {
  validate_for_fit(data);
  if (options.max_iter < 1 || !(options.grad_tol > 0.0) || !(options.step_tol > 0.0)) {
    throw Error(ErrorKind::Validation, "invalid optimizer options");
  }
  validate_tau(options.tau.value, options.tau_max);

  Eigen::VectorXd start = Eigen::VectorXd::Zero(data.cols());
  if (options.start) {
    if (options.start->size() != data.cols() || !options.start->allFinite()) {
      throw Error(ErrorKind::Validation, "starting coefficients do not match the design");
    }
    start = *options.start;
  }

  if (options.tau.mode == TauMode::Fixed) {
    return finalize(data, options.tau, fit_fixed(data, options.tau.value, start, options));
  }
  ProfilePoint best = profile_tau(data, start, options);
  return finalize(data, ShapeTau{best.tau, TauMode::Profiled}, std::move(best.fit));
}

double normal_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Domain, fmt::format("alpha={} outside (0,1)", alpha));
  return boost::math::quantile(boost::math::normal_distribution<double>{}, 1.0 - alpha / 2.0);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

InferenceTable wald_inference(const FitResult& fit, double alpha, bool test_intercept) {
  if (!fit.converged) throw Error(ErrorKind::Inference, "Wald inference requires a converged fit");
  const double z = normal_critical_value(alpha);
  InferenceTable table;
  table.alpha = alpha;
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
    InferenceRow row;
    row.name = j < static_cast<Eigen::Index>(fit.column_names.size()) ? fit.column_names[j] : fmt::format("beta{}", j + 1);
    row.estimate = fit.beta[j];
    row.se = fit.se[j];
    row.ci_low = row.estimate - z * row.se;
    row.ci_high = row.estimate + z * row.se;
    const bool is_intercept = fit.has_intercept && j == 0;
    if (!is_intercept || test_intercept) row.p_value = normal_two_sided_p(row.estimate / row.se);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace gevreg
