/* Exercises the C interface from plain C. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "symflow/symflow.h"

static int failures = 0;

#define EXPECT(cond)                                                      \
  do {                                                                    \
    if (!(cond)) {                                                        \
      fprintf(stderr, "%s:%d: expected %s (%s)\n", __FILE__, __LINE__,   \
              #cond, symflow_last_error());                              \
      ++failures;                                                         \
    }                                                                     \
  } while (0)

static const char* scratch_dir(const char* leaf, char* buf, size_t cap) {
  const char* base = getenv("SYMFLOW_TMP");
  snprintf(buf, cap, "%s/%s", base ? base : "/tmp/symflow_capi", leaf);
  return buf;
}

static void test_presets(void) {
  size_t i, n = symflow_preset_count();
  EXPECT(n == 8);
  for (i = 0; i < n; ++i) {
    symflow_config* c = NULL;
    EXPECT(symflow_config_preset(symflow_preset_name(i), &c) == SYMFLOW_OK);
    symflow_config_free(c);
  }
  EXPECT(symflow_preset_name(n) == NULL);
}

static void test_errors(void) {
  symflow_config* c = NULL;
  EXPECT(symflow_config_preset("no-such-preset", &c) == SYMFLOW_ERR_CONFIG);
  EXPECT(c == NULL);
  EXPECT(strlen(symflow_last_error()) > 0);
  EXPECT(symflow_config_parse("[grid]\nn = 32\nwhat = 1\n", &c) == SYMFLOW_ERR_CONFIG);
  EXPECT(strstr(symflow_last_error(), "line 3") != NULL);
  EXPECT(symflow_config_preset(NULL, &c) == SYMFLOW_ERR_INVALID_ARGUMENT);
  EXPECT(symflow_config_preset("sol-exact", NULL) == SYMFLOW_ERR_INVALID_ARGUMENT);
  EXPECT(symflow_config_override(NULL, "grid.n=8") == SYMFLOW_ERR_INVALID_ARGUMENT);
  EXPECT(symflow_verify_dir("/nonexistent/symflow", NULL, NULL) ==
         SYMFLOW_ERR_INVALID_ARGUMENT);
  {
    symflow_report* r = NULL;
    EXPECT(symflow_verify_dir("/nonexistent/symflow", NULL, &r) == SYMFLOW_ERR_IO);
  }
  symflow_config_free(NULL);
  symflow_run_free(NULL);
  symflow_report_free(NULL);
  EXPECT(symflow_run_record_count(NULL) == 0);
}

static void test_serialize(void) {
  symflow_config* c = NULL;
  symflow_config* d = NULL;
  size_t needed = 0, again = 0;
  char* text;
  char* text2;
  char tiny[8];
  EXPECT(symflow_config_preset("sol-hyperbolic", &c) == SYMFLOW_OK);
  EXPECT(symflow_config_override(c, "grid.n=48") == SYMFLOW_OK);
  EXPECT(symflow_config_override(c, "grid.n=oops") == SYMFLOW_ERR_CONFIG);
  EXPECT(symflow_config_serialize(c, NULL, 0, &needed) == SYMFLOW_OK);
  EXPECT(needed > 1);
  text = malloc(needed);
  EXPECT(symflow_config_serialize(c, text, needed, &needed) == SYMFLOW_OK);
  EXPECT(strlen(text) + 1 == needed);
  EXPECT(strstr(text, "n = 48") != NULL);
  EXPECT(symflow_config_serialize(c, tiny, sizeof tiny, NULL) == SYMFLOW_OK);
  EXPECT(strlen(tiny) == sizeof tiny - 1);

  EXPECT(symflow_config_parse(text, &d) == SYMFLOW_OK);
  symflow_config_serialize(d, NULL, 0, &again);
  text2 = malloc(again);
  symflow_config_serialize(d, text2, again, NULL);
  EXPECT(strcmp(text, text2) == 0);
  free(text);
  free(text2);
  symflow_config_free(c);
  symflow_config_free(d);
}

static void test_run_and_dirs(void) {
  char dir[512], scaled[512], assign[600];
  symflow_config* c = NULL;
  symflow_run* run = NULL;
  symflow_report* rep = NULL;
  symflow_record first, last;
  symflow_fit fit;
  symflow_singularity sing;
  size_t i, n;

  scratch_dir("sol", dir, sizeof dir);
  scratch_dir("sol_scaled", scaled, sizeof scaled);
  EXPECT(symflow_config_preset("sol-exact", &c) == SYMFLOW_OK);
  EXPECT(symflow_config_override(c, "grid.n=128") == SYMFLOW_OK);
  EXPECT(symflow_config_override(c, "controller.t_end=1.5") == SYMFLOW_OK);
  snprintf(assign, sizeof assign, "output.dir=%s", dir);
  EXPECT(symflow_config_override(c, assign) == SYMFLOW_OK);

  EXPECT(symflow_run_scenario(c, &run) == SYMFLOW_OK);
  EXPECT(strcmp(symflow_run_stop_reason(run), "reached_t_end") == 0);
  n = symflow_run_record_count(run);
  EXPECT(n > 2);
  EXPECT(symflow_run_record(run, 0, &first) == SYMFLOW_OK);
  EXPECT(symflow_run_record(run, n - 1, &last) == SYMFLOW_OK);
  EXPECT(symflow_run_record(run, n, &last) == SYMFLOW_ERR_INVALID_ARGUMENT);
  EXPECT(fabs(first.t - 1.0) < 1e-15);
  EXPECT(fabs(last.t - 1.5) < 1e-15);
  EXPECT(fabs(last.L - 2.0 * sqrt(1.5)) < 1e-8);
  EXPECT(symflow_run_passed(run) == 1);
  EXPECT(symflow_run_singularity(run, &sing) == SYMFLOW_ERR_INVALID_STATE);
  EXPECT(symflow_run_fit_count(run) == 1);
  EXPECT(symflow_run_fit(run, 0, &fit) == SYMFLOW_OK);
  EXPECT(strcmp(fit.kind, "curvature-decay") == 0);

  {
    const symflow_report* r = symflow_run_report(run);
    symflow_check chk;
    int saw_stop = 0;
    for (i = 0; i < symflow_report_check_count(r); ++i) {
      EXPECT(symflow_report_check(r, i, &chk) == SYMFLOW_OK);
      if (strcmp(chk.name, "stop_reason") == 0) saw_stop = 1;
      if (!chk.diagnostic) EXPECT(chk.status != SYMFLOW_CHECK_FAIL);
    }
    EXPECT(saw_stop);
  }
  symflow_run_free(run);

  EXPECT(symflow_verify_dir(dir, c, &rep) == SYMFLOW_OK);
  EXPECT(symflow_report_passed(rep) == 1);
  EXPECT(symflow_report_check_count(rep) > 3);
  symflow_report_free(rep);

  EXPECT(symflow_fit_dir(dir, "curvature-decay", &fit) == SYMFLOW_OK);
  EXPECT(fit.pass == 1);
  EXPECT(symflow_fit_dir(dir, "nonsense", &fit) == SYMFLOW_ERR_CONFIG);

  EXPECT(symflow_rescale_dir(dir, scaled, 4.0, "bundle") == SYMFLOW_OK);
  EXPECT(symflow_rescale_dir(dir, scaled, 4.0, "warped-2d") == SYMFLOW_ERR_INVALID_ARGUMENT);
  EXPECT(symflow_rescale_dir(dir, scaled, -1.0, NULL) == SYMFLOW_ERR_INVALID_ARGUMENT);
  EXPECT(symflow_verify_dir(scaled, NULL, &rep) == SYMFLOW_OK);
  EXPECT(symflow_report_passed(rep) == 1);
  symflow_report_free(rep);

  symflow_config_free(c);
}

int main(void) {
  EXPECT(strlen(symflow_version()) > 0);
  test_presets();
  test_errors();
  test_serialize();
  test_run_and_dirs();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  puts("capi: all checks passed");
  return 0;
}
