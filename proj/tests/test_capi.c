/* Copyright 2026 The lbplab Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Exercises the C interface from C.
 */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "lbp/lbp.h"

static int failures = 0;

#define EXPECT(cond)                                                    \
  do {                                                                  \
    if (!(cond)) {                                                      \
      fprintf(stderr, "%s:%d: expected %s (%s)\n", __FILE__, __LINE__, #cond, \
              lbp_last_error());                                        \
      ++failures;                                                       \
    }                                                                   \
  } while (0)

static void test_primitives(void) {
  const double a[3] = {1.0, 0.0, 0.0};
  const double b[3] = {0.0, 2.0, 0.0};
  const double e[9] = {1, 0, 0, 0, 1, 0, -1, 0, 0};
  double c = -5.0, p[3];
  EXPECT(lbp_cosine(a, a, 3, &c) == LBP_OK && fabs(c - 1.0) < 1e-15);
  EXPECT(lbp_cosine(a, b, 3, &c) == LBP_OK && fabs(c) < 1e-15);
  EXPECT(lbp_softmax_probs(a, e, 3, 3, 1.0, p) == LBP_OK);
  EXPECT(fabs(p[0] + p[1] + p[2] - 1.0) < 1e-12);
  EXPECT(fabs(p[0] - 0.66524095577) < 1e-9);

  const double zero[3] = {0.0, 0.0, 0.0};
  EXPECT(lbp_cosine(a, zero, 3, &c) != LBP_OK);
  EXPECT(strlen(lbp_last_error()) > 0);
  EXPECT(lbp_softmax_probs(a, e, 3, 3, 0.0, p) != LBP_OK);
  EXPECT(lbp_cosine(NULL, a, 3, &c) == LBP_ERR_INVALID_ARGUMENT);
  EXPECT(lbp_cosine(a, a, 3, &c) == LBP_OK && strcmp(lbp_last_error(), "") == 0);
}

static void test_config(void) {
  lbp_config* cfg = NULL;
  lbp_config* back = NULL;
  char* text = NULL;
  uint64_t h0 = 0, h1 = 0, h2 = 0;
  EXPECT(lbp_config_default(&cfg) == LBP_OK);
  EXPECT(lbp_config_hash(cfg, &h0) == LBP_OK);
  EXPECT(lbp_config_render(cfg, &text) == LBP_OK);
  EXPECT(lbp_config_parse(text, &back) == LBP_OK);
  EXPECT(lbp_config_hash(back, &h1) == LBP_OK && h1 == h0);
  EXPECT(lbp_config_override(cfg, "train.tau=0.05") == LBP_OK);
  EXPECT(lbp_config_hash(cfg, &h2) == LBP_OK && h2 != h0);
  EXPECT(lbp_config_override(cfg, "train.unknown=1") != LBP_OK);
  EXPECT(lbp_config_parse("{\"bogus\": {}}", &back) != LBP_OK);
  EXPECT(lbp_config_load("/nonexistent/lbp.json", &back) == LBP_ERR_IO);
  EXPECT(lbp_status_string(LBP_ERR_FORMAT) != NULL);
  EXPECT(strlen(lbp_version()) > 0);
  lbp_string_free(text);
  lbp_config_free(back);
  lbp_config_free(cfg);
  lbp_config_free(NULL);
}

static void test_pipeline(void) {
  lbp_config* cfg = NULL;
  lbp_dataset *train = NULL, *infer = NULL;
  lbp_checkpoint* ck = NULL;
  char *split = NULL, *history = NULL, *r1 = NULL, *r2 = NULL, *json = NULL;
  size_t n = 0, k = 0;
  double init = 0.0, fin = 0.0, top1 = -1.0;

  EXPECT(lbp_config_default(&cfg) == LBP_OK);
  EXPECT(lbp_config_override(cfg, "scenario.train_images=16") == LBP_OK);
  EXPECT(lbp_config_override(cfg, "scenario.infer_images=12") == LBP_OK);
  EXPECT(lbp_config_override(cfg, "train.steps=5") == LBP_OK);
  EXPECT(lbp_config_set_seed(cfg, 3) == LBP_OK);
  EXPECT(lbp_scenario_generate(cfg, &train, &infer) == LBP_OK);
  EXPECT(lbp_dataset_split(train, &split) == LBP_OK && strcmp(split, "train") == 0);
  EXPECT(lbp_dataset_proposal_count(train, &n) == LBP_OK && n > 0);
  EXPECT(lbp_estimate_k(cfg, train, &k, NULL, NULL) == LBP_OK && k >= 2);

  EXPECT(lbp_train(cfg, infer, &ck, NULL) != LBP_OK);
  EXPECT(lbp_train(cfg, train, &ck, &history) == LBP_OK);
  EXPECT(history != NULL && strlen(history) > 0);
  EXPECT(lbp_checkpoint_losses(ck, &init, &fin) == LBP_OK);
  EXPECT(isfinite(init) && isfinite(fin) && init > 0.0);
  EXPECT(lbp_evaluate(cfg, ck, infer, 1, &top1, &json, NULL) == LBP_OK);
  EXPECT(top1 >= 0.0 && top1 <= 1.0);

  EXPECT(lbp_checkpoint_render(ck, &r1) == LBP_OK);
  lbp_checkpoint_free(ck);
  ck = NULL;
  EXPECT(lbp_train(cfg, train, &ck, NULL) == LBP_OK);
  EXPECT(lbp_checkpoint_render(ck, &r2) == LBP_OK);
  EXPECT(r1 && r2 && strcmp(r1, r2) == 0);

  lbp_string_free(split);
  lbp_string_free(history);
  lbp_string_free(r1);
  lbp_string_free(r2);
  lbp_string_free(json);
  lbp_checkpoint_free(ck);
  lbp_dataset_free(train);
  lbp_dataset_free(infer);
  lbp_config_free(cfg);
}

int main(void) {
  test_primitives();
  test_config();
  test_pipeline();
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
