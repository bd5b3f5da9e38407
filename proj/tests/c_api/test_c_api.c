/* Exercises the public C interface through the shared library. */
#include <gevreg/gevreg.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;
static int checks = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    ++checks;                                                          \
    if (!(cond)) {                                                     \
      ++failures;                                                      \
      fprintf(stderr, "%s:%d: check failed: %s (last error: %s)\n",    \
              __FILE__, __LINE__, #cond, gevreg_last_error());         \
    }                                                                  \
  } while (0)

#define EXPECT_NEAR(a, b, tol) EXPECT(fabs((a) - (b)) <= (tol))

static void test_kernel(void) {
  double v = 0.0;
  EXPECT(gevreg_response_prob(0.5, 1.0, &v) == GEVREG_OK);
  EXPECT_NEAR(v, 0.864664716763387, 1e-14);
  EXPECT(gevreg_response_prob(2.0, 1.0, &v) == GEVREG_OK && v == 1.0);
  EXPECT(gevreg_link(0.5, 0.0, &v) == GEVREG_OK);
  EXPECT_NEAR(v, -0.366512920581664, 1e-14);
  EXPECT(gevreg_log_survival(0.5, 1.0, &v) == GEVREG_OK);
  EXPECT_NEAR(v, -2.0, 1e-15);
  EXPECT(gevreg_log_survival(2.0, 1.0, &v) == GEVREG_OK && isinf(v) && v < 0);
  EXPECT(gevreg_d_prob_d_eta(0.0, 1.0, &v) == GEVREG_OK);
  EXPECT_NEAR(v, 0.367879441171442, 1e-14);

  EXPECT(gevreg_link(1.0, 0.5, &v) == GEVREG_ERR_DOMAIN);
  EXPECT(strlen(gevreg_last_error()) > 0);
  EXPECT(gevreg_response_prob(NAN, 0.5, &v) == GEVREG_ERR_DOMAIN);
  EXPECT(gevreg_d_prob_d_eta(2.0, 1.0, &v) == GEVREG_ERR_DERIVATIVE);
  EXPECT(gevreg_response_prob(0.0, 0.5, NULL) == GEVREG_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(gevreg_status_name(GEVREG_ERR_SEPARATION), "separation") == 0);
  EXPECT(strlen(gevreg_version()) > 0);
}

static void test_arrays_and_separation(void) {
  const double y[] = {0, 0, 1, 1};
  const double x[] = {-2, -1, 1, 2};
  const char* names[] = {"x"};
  gevreg_dataset* data = NULL;
  gevreg_fit* fit = NULL;
  gevreg_fit_options opt;

  EXPECT(gevreg_dataset_from_arrays(4, 1, y, x, names, 1, "y", &data) == GEVREG_OK);
  EXPECT(gevreg_dataset_rows(data) == 4);
  EXPECT(gevreg_dataset_cols(data) == 2);
  EXPECT_NEAR(gevreg_dataset_prevalence(data), 0.5, 0.0);

  gevreg_fit_options_init(&opt);
  opt.tau_mode = GEVREG_TAU_FIXED;
  opt.tau = 0.0;
  EXPECT(gevreg_fit_mle(data, &opt, &fit) == GEVREG_ERR_SEPARATION);
  EXPECT(fit == NULL);
  EXPECT(strstr(gevreg_last_error(), "separat") != NULL);
  gevreg_dataset_free(data);

  {
    const double bad_y[] = {0, 2};
    const double bad_x[] = {1, 2};
    data = NULL;
    EXPECT(gevreg_dataset_from_arrays(2, 1, bad_y, bad_x, names, 1, "y", &data) == GEVREG_ERR_VALIDATION);
    EXPECT(data == NULL);
  }
}

static void test_fit_and_bootstrap(void) {
  gevreg_dataset* data = NULL;
  gevreg_fit* fit = NULL;
  gevreg_bootstrap* boot = NULL;
  gevreg_bootstrap* boot8 = NULL;
  gevreg_fit_options opt;
  gevreg_boot_options bopt;
  double beta[2], se[2], vcov[4], mean[2], bse[2], lo[2], hi[2], p[2];
  double mean8[2], p8[2];
  char* text = NULL;
  char* json = NULL;
  char* csv = NULL;
  size_t j;

  EXPECT(gevreg_dataset_dengue_analog(1, &data) == GEVREG_OK);
  EXPECT(gevreg_dataset_rows(data) == 515);
  EXPECT(gevreg_dataset_to_csv(data, &csv) == GEVREG_OK);
  EXPECT(csv != NULL && strncmp(csv, "infected,weight\n", 16) == 0);
  gevreg_string_free(csv);

  gevreg_fit_options_init(&opt);
  EXPECT(opt.tau_mode == GEVREG_TAU_PROFILED);
  EXPECT(opt.max_iter == 200);
  opt.tau_mode = GEVREG_TAU_FIXED;
  opt.tau = -0.25;
  EXPECT(gevreg_fit_mle(data, &opt, &fit) == GEVREG_OK);
  EXPECT(gevreg_fit_converged(fit) == 1);
  EXPECT(gevreg_fit_num_params(fit) == 2);
  EXPECT(gevreg_fit_tau(fit) == -0.25);
  EXPECT(gevreg_fit_tau_mode(fit) == GEVREG_TAU_FIXED);
  EXPECT(gevreg_fit_loglik(fit) < 0.0);
  EXPECT(gevreg_fit_iterations(fit) > 0);
  EXPECT(gevreg_fit_coefficients(fit, beta, 2) == GEVREG_OK);
  EXPECT(gevreg_fit_coefficients(fit, beta, 1) == GEVREG_ERR_INVALID_ARGUMENT);
  EXPECT(gevreg_fit_std_errors(fit, se, 2) == GEVREG_OK);
  EXPECT(gevreg_fit_vcov(fit, vcov, 4) == GEVREG_OK);
  EXPECT_NEAR(se[1], sqrt(vcov[3]), 1e-15);
  EXPECT(vcov[1] == vcov[2] || fabs(vcov[1] - vcov[2]) < 1e-10);
  EXPECT(fabs(beta[1] + 0.0456) < 4.0 * se[1]);

  EXPECT(gevreg_fit_report(fit, 0.05, GEVREG_FORMAT_TEXT, &text) == GEVREG_OK);
  EXPECT(text != NULL && strstr(text, "Intercept (beta1)") != NULL);
  EXPECT(text != NULL && strstr(text, "weight (beta2)") != NULL);
  gevreg_string_free(text);
  EXPECT(gevreg_fit_report(fit, 0.05, GEVREG_FORMAT_JSON, &json) == GEVREG_OK);
  EXPECT(json != NULL && strstr(json, "\"command\": \"fit\"") != NULL);
  gevreg_string_free(json);
  EXPECT(gevreg_fit_report(fit, 1.5, GEVREG_FORMAT_TEXT, &text) == GEVREG_ERR_INVALID_ARGUMENT);

  gevreg_boot_options_init(&bopt);
  EXPECT(bopt.replicates == 1000);
  EXPECT(bopt.seed == 20240101u);
  bopt.replicates = 100;
  bopt.seed = 42;
  bopt.workers = 1;
  EXPECT(gevreg_bootstrap_run(data, fit, &bopt, &boot) == GEVREG_OK);
  EXPECT(gevreg_bootstrap_requested(boot) == 100);
  EXPECT(gevreg_bootstrap_effective(boot) + gevreg_bootstrap_failed(boot) == 100);
  EXPECT(gevreg_bootstrap_mean(boot, mean, 2) == GEVREG_OK);
  EXPECT(gevreg_bootstrap_std_errors(boot, bse, 2) == GEVREG_OK);
  EXPECT(gevreg_bootstrap_ci(boot, lo, hi, 2) == GEVREG_OK);
  EXPECT(gevreg_bootstrap_p_values(boot, p, 2) == GEVREG_OK);
  for (j = 0; j < 2; ++j) {
    EXPECT(lo[j] <= hi[j]);
    EXPECT(bse[j] > 0.0);
  }
  EXPECT(p[1] >= 0.0 && p[1] <= 1.0);
  EXPECT(gevreg_bootstrap_report(boot, GEVREG_FORMAT_TEXT, &text) == GEVREG_OK);
  EXPECT(text != NULL && strstr(text, "parametric bootstrap") != NULL);
  gevreg_string_free(text);

  bopt.workers = 8;
  EXPECT(gevreg_bootstrap_run(data, fit, &bopt, &boot8) == GEVREG_OK);
  EXPECT(gevreg_bootstrap_mean(boot8, mean8, 2) == GEVREG_OK);
  EXPECT(gevreg_bootstrap_p_values(boot8, p8, 2) == GEVREG_OK);
  EXPECT(memcmp(mean, mean8, sizeof mean) == 0);
  EXPECT(memcmp(p, p8, sizeof p) == 0);

  bopt.replicates = 1;
  gevreg_bootstrap_free(boot);
  boot = NULL;
  EXPECT(gevreg_bootstrap_run(data, fit, &bopt, &boot) == GEVREG_ERR_INSUFFICIENT_REPLICATES);
  EXPECT(boot == NULL);

  gevreg_bootstrap_free(boot8);
  gevreg_fit_free(fit);
  gevreg_dataset_free(data);
}

static void test_simulate_and_csv(void) {
  gevreg_dataset* data = NULL;
  const char* spec =
      "{\"n\": 300, \"beta\": [1.0, -0.05], \"tau\": -0.25, \"seed\": 4,"
      " \"covariates\": [{\"name\": \"weight\", \"distribution\": \"uniform\", \"a\": 20, \"b\": 80}]}";
  char path[] = "/tmp/gevreg_c_api_XXXXXX";
  const char* preds[] = {"weight"};
  char* csv = NULL;
  FILE* f;
  int fd;

  EXPECT(gevreg_dataset_simulate(spec, &data) == GEVREG_OK);
  EXPECT(gevreg_dataset_rows(data) == 300);
  EXPECT(gevreg_dataset_to_csv(data, &csv) == GEVREG_OK);
  gevreg_dataset_free(data);
  data = NULL;

  fd = mkstemp(path);
  EXPECT(fd >= 0);
  f = fdopen(fd, "w");
  fputs(csv, f);
  fclose(f);
  gevreg_string_free(csv);

  EXPECT(gevreg_dataset_read_csv(path, "y", preds, 1, 1, &data) == GEVREG_OK);
  EXPECT(gevreg_dataset_rows(data) == 300);
  gevreg_dataset_free(data);
  data = NULL;
  {
    const char* missing[] = {"height"};
    EXPECT(gevreg_dataset_read_csv(path, "y", missing, 1, 1, &data) == GEVREG_ERR_SCHEMA);
    EXPECT(strstr(gevreg_last_error(), "height") != NULL);
  }
  remove(path);
  EXPECT(gevreg_dataset_read_csv(path, "y", preds, 1, 1, &data) == GEVREG_ERR_IO);
  EXPECT(gevreg_dataset_simulate("{\"n\": 0, \"beta\": [0]}", &data) == GEVREG_ERR_VALIDATION);
  EXPECT(gevreg_dataset_simulate(NULL, &data) == GEVREG_ERR_INVALID_ARGUMENT);
}

int main(void) {
  test_kernel();
  test_arrays_and_separation();
  test_fit_and_bootstrap();
  test_simulate_and_csv();
  printf("%d checks, %d failures\n", checks, failures);
  return failures == 0 ? 0 : 1;
}
