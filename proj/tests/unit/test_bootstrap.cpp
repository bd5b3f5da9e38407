#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "bootstrap.hpp"
#include "random.hpp"
#include "simgen.hpp"
#include "unit/support.hpp"

using namespace gevreg;

namespace {

ReplicateMatrix column(const std::vector<double>& v) {
  ReplicateMatrix r;
  r.values = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  r.t_stats = Eigen::MatrixXd::Zero(r.values.rows(), 1);
  r.requested = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) r.index.push_back(i);
  return r;
}

FitResult constant_prob_fit(double eta, std::size_t p = 1) {
  FitResult f;
  f.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  f.beta(0) = eta;
  f.tau = ShapeTau::fixed(0.0);
  f.converged = true;
  f.se = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p));
  return f;
}

Dataset ones_design(std::size_t n) {
  return make_dataset(std::vector<double>(n, 0.0), {}, {}, true);
}

SimSpec weight_spec(std::size_t n, double slope, std::uint64_t seed) {
  SimSpec s;
  s.n = n;
  s.beta = {1.0, slope};
  s.tau = -0.25;
  s.covariates = {CovariateSpec::uniform("weight", 20.0, 80.0)};
  s.seed = seed;
  return s;
}

FitOptions fixed(double tau) {
  FitOptions o;
  o.tau = ShapeTau::fixed(tau);
  return o;
}

}  // namespace

TEST_CASE("replicate seeds are a fixed function of (seed, b)") {
  // SplitMix64 reference: first output of a generator seeded with 0 is
  // 0xE220A8397B1DCDAF.
  CHECK(replicate_seed(0, 0) == 0xE220A8397B1DCDAFULL);
  CHECK(replicate_seed(42, 7) == replicate_seed(42, 7));
  CHECK(replicate_seed(42, 7) != replicate_seed(42, 8));
  CHECK(replicate_seed(42, 7) != replicate_seed(43, 7));
  CHECK(unit_uniform(0) == 0.0);
  CHECK(unit_uniform(~0ULL) < 1.0);
}

TEST_CASE("bootstrap_mean_se arithmetic") {
  auto [m1, s1] = bootstrap_mean_se(column({1.0, 3.0}));
  CHECK(m1(0) == 2.0);
  CHECK(s1(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  auto [m2, s2] = bootstrap_mean_se(column({0.7, 0.7, 0.7, 0.7}));
  CHECK(m2(0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(s2(0) == doctest::Approx(0.0).epsilon(1e-15));
  auto [m3, s3] = bootstrap_mean_se(column({0.0, 1.0, 2.0, 3.0, 4.0}));
  CHECK(m3(0) == 2.0);
  CHECK(s3(0) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-15));
  CHECK_ERROR_KIND(bootstrap_mean_se(column({1.0})), ErrorKind::InsufficientReplicates);
  CHECK_ERROR_KIND(bootstrap_mean_se(column({})), ErrorKind::InsufficientReplicates);
}

TEST_CASE("percentile_ci rank arithmetic") {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);  // unsorted on purpose
  const auto ci = percentile_ci(column(v), 0.05);
  CHECK(ci[0].low == 3.0);
  CHECK(ci[0].high == 98.0);
  const auto flat = percentile_ci(column(std::vector<double>(50, 2.5)), 0.05);
  CHECK(flat[0].low == 2.5);
  CHECK(flat[0].high == 2.5);
  CHECK_ERROR_KIND(percentile_ci(column(std::vector<double>(39, 1.0)), 0.05), ErrorKind::InsufficientReplicates);
  CHECK_NOTHROW((void)percentile_ci(column(std::vector<double>(40, 1.0)), 0.05));
}

TEST_CASE("percentile_ci on standard normal draws") {
  std::mt19937_64 rng(20240101);
  std::normal_distribution<double> nd;
  std::vector<double> v(1000);
  for (double& x : v) x = nd(rng);
  const auto ci = percentile_ci(column(v), 0.05);
  CHECK(std::abs(ci[0].low + 1.959963984540054) < 0.15);
  CHECK(std::abs(ci[0].high - 1.959963984540054) < 0.15);
}

TEST_CASE("property: CI nesting and median ordering") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> size_d(40, 400);
    std::lognormal_distribution<double> ld(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(size_d(rng)));
    for (double& x : v) x = ld(rng) - 1.0;
    const ReplicateMatrix r = column(v);
    const auto wide = percentile_ci(r, 0.05);
    const auto narrow = percentile_ci(r, 0.10);
    CHECK(wide[0].low <= narrow[0].low);
    CHECK(narrow[0].high <= wide[0].high);
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    const double median = s.size() % 2 ? s[s.size() / 2] : 0.5 * (s[s.size() / 2 - 1] + s[s.size() / 2]);
    CHECK(wide[0].low <= median);
    CHECK(median <= wide[0].high);
  }
}

TEST_CASE("bootstrap p-values count exceedances") {
  ReplicateMatrix r = column(std::vector<double>(100, 0.0));
  for (int b = 0; b < 100; ++b) r.t_stats(b, 0) = (b < 4 ? 5.0 : 0.5) * (b % 2 ? -1.0 : 1.0);
  std::vector<std::size_t> exceed;
  const Eigen::VectorXd p = bootstrap_p_values(Eigen::VectorXd::Constant(1, -3.0), r, &exceed);
  CHECK(p(0) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(exceed[0] == 4);
  // ties do not count as exceedances
  r.t_stats.setConstant(3.0);
  CHECK(bootstrap_p_values(Eigen::VectorXd::Constant(1, 3.0), r)(0) == 0.0);
  // null statistic
  for (int b = 0; b < 100; ++b) r.t_stats(b, 0) = 1e-9 * (b + 1);
  CHECK(bootstrap_p_values(Eigen::VectorXd::Zero(1), r)(0) == 1.0);
}

TEST_CASE("parametric_resample determinism and degenerate fits") {
  const Dataset design = ones_design(500);
  const FitResult certain = constant_prob_fit(40.0);  // pi = 1 to double precision
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    const Dataset r = parametric_resample(certain, design, seed);
    CHECK(r.y.sum() == 500.0);
    CHECK(r.X == design.X);
  }
  const FitResult half = constant_prob_fit(std::log(std::log(2.0)));
  const Dataset a = parametric_resample(half, design, 5);
  const Dataset b = parametric_resample(half, design, 5);
  const Dataset c = parametric_resample(half, design, 6);
  CHECK(a.y == b.y);
  CHECK(a.y != c.y);
}

TEST_CASE("parametric_resample concentration at pi = 0.5") {
  const Dataset design = ones_design(100000);
  const FitResult half = constant_prob_fit(std::log(std::log(2.0)));
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const double m = parametric_resample(half, design, seed).y.mean();
    CHECK(m >= 0.494);
    CHECK(m <= 0.506);
  }
}

TEST_CASE("run_bootstrap is identical across worker counts") {
  const Dataset d = simulate_dataset(weight_spec(300, -0.05, 31));
  const FitResult fit = fit_mle(d, fixed(-0.25));
  REQUIRE(fit.converged);
  BootstrapOptions o;
  o.replicates = 200;
  o.seed = 42;
  o.workers = 1;
  const BootstrapResult r1 = run_bootstrap(d, fit, o);
  o.workers = 8;
  const BootstrapResult r8 = run_bootstrap(d, fit, o);
  CHECK(r1.mean == r8.mean);
  CHECK(r1.se == r8.se);
  CHECK(r1.p_values == r8.p_values);
  CHECK(r1.t_obs == r8.t_obs);
  for (std::size_t j = 0; j < r1.ci.size(); ++j) {
    CHECK(r1.ci[j].low == r8.ci[j].low);
    CHECK(r1.ci[j].high == r8.ci[j].high);
  }
  CHECK(r1.effective == r8.effective);

  const ReplicateMatrix m3 = draw_replicates(d, fit, 50, 42, 3);
  const ReplicateMatrix m1 = draw_replicates(d, fit, 50, 42, 1);
  CHECK(m3.values == m1.values);
  CHECK(m3.t_stats == m1.t_stats);
  CHECK(m3.index == m1.index);
}

TEST_CASE("run_bootstrap result invariants") {
  const Dataset d = simulate_dataset(weight_spec(400, -0.05, 32));
  const FitResult fit = fit_mle(d, fixed(-0.25));
  REQUIRE(fit.converged);
  BootstrapOptions o;
  o.replicates = 200;
  o.seed = 7;
  const BootstrapResult r = run_bootstrap(d, fit, o);
  CHECK(r.requested == 200);
  CHECK(r.effective + r.failed == r.requested);
  CHECK(5 * r.effective >= 4 * r.requested);
  for (Eigen::Index j = 0; j < r.mean.size(); ++j) {
    CHECK(r.ci[static_cast<std::size_t>(j)].low <= r.ci[static_cast<std::size_t>(j)].high);
    CHECK(r.se(j) > 0.0);
    CHECK(r.p_values(j) >= 0.0);
    CHECK(r.p_values(j) <= 1.0);
    const double count = r.p_values(j) * static_cast<double>(r.effective);
    CHECK(count == doctest::Approx(std::round(count)).epsilon(1e-12));
    CHECK(static_cast<std::size_t>(std::llround(count)) == r.exceedances[static_cast<std::size_t>(j)]);
    CHECK(r.t_obs(j) == doctest::Approx(fit.beta(j) / fit.se(j)).epsilon(1e-15));
  }
  // bootstrap se against Wald se on the slope
  const double ratio = r.se(1) / fit.se(1);
  CHECK(ratio >= 0.5);
  CHECK(ratio <= 2.0);
}

TEST_CASE("strong effect gives zero exceedances") {
  const Dataset d = simulate_dataset(weight_spec(2000, -0.05, 33));
  const FitResult fit = fit_mle(d, fixed(-0.25));
  REQUIRE(fit.converged);
  const Eigen::VectorXd p = bootstrap_test(fit, d, 500, 3, 1);
  CHECK(p(1) == 0.0);
}

TEST_CASE("bootstrap preconditions") {
  const Dataset d = simulate_dataset(weight_spec(300, -0.05, 34));
  FitResult fit = fit_mle(d, fixed(-0.25));
  BootstrapOptions o;
  o.replicates = 1;
  CHECK_ERROR_KIND(run_bootstrap(d, fit, o), ErrorKind::InsufficientReplicates);
  fit.converged = false;
  o.replicates = 10;
  CHECK_ERROR_KIND(run_bootstrap(d, fit, o), ErrorKind::Inference);
  CHECK_ERROR_KIND(bootstrap_test(fit, d, 10, 1), ErrorKind::Inference);
}

TEST_CASE("unreliable runs carry partial results") {
  // Separation-prone design: 20 rows and a strong effect, so most
  // replicates are perfectly separated.
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i - 9.5);
    y.push_back(i >= 10 ? 1.0 : 0.0);
  }
  y[9] = 1.0;
  y[10] = 0.0;
  const Dataset d = make_dataset(y, {x}, {"x"}, true);
  const FitResult fit = fit_mle(d, fixed(0.0));
  REQUIRE(fit.converged);
  BootstrapOptions o;
  o.replicates = 100;
  o.seed = 1;
  o.fit = fixed(0.0);
  try {
    (void)run_bootstrap(d, fit, o);
    FAIL("expected an unreliable run");
  } catch (const UnreliableRunError& e) {
    CHECK(e.kind() == ErrorKind::UnreliableRun);
    CHECK(e.partial().requested == 100);
    CHECK(e.partial().failed > 20);
    CHECK(e.partial().effective + e.partial().failed == 100);
  }
}
