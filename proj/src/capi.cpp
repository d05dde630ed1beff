// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/lbp.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "lbp/eval.hpp"
#include "lbp/io.hpp"

struct lbp_config {
  lbp::LabConfig value;
};

struct lbp_dataset {
  lbp::Dataset value;
};

struct lbp_checkpoint {
  lbp::Checkpoint value;
};

namespace {

thread_local std::string g_last_error;

lbp_status to_status(lbp::ErrorCode code) {
  switch (code) {
    case lbp::ErrorCode::kOk: return LBP_OK;
    case lbp::ErrorCode::kInvalidArgument: return LBP_ERR_INVALID_ARGUMENT;
    case lbp::ErrorCode::kDimensionMismatch: return LBP_ERR_DIMENSION_MISMATCH;
    case lbp::ErrorCode::kOutOfRange: return LBP_ERR_OUT_OF_RANGE;
    case lbp::ErrorCode::kNonFinite: return LBP_ERR_NON_FINITE;
    case lbp::ErrorCode::kInfeasible: return LBP_ERR_INFEASIBLE;
    case lbp::ErrorCode::kIo: return LBP_ERR_IO;
    case lbp::ErrorCode::kFormat: return LBP_ERR_FORMAT;
    case lbp::ErrorCode::kInvariant: return LBP_ERR_INVARIANT;
    case lbp::ErrorCode::kInternal: return LBP_ERR_INTERNAL;
  }
  return LBP_ERR_INTERNAL;
}

template <typename F>
lbp_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return LBP_OK;
  } catch (const lbp::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LBP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LBP_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  lbp::require(p != nullptr, lbp::ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
}

void emit(char** out, const std::string& s) {
  if (!out) return;
  char* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (!buf) throw std::bad_alloc();
  std::memcpy(buf, s.data(), s.size() + 1);
  *out = buf;
}

void check_report(const lbp::EvalReport& r) {
  using lbp::ErrorCode;
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  lbp::require(unit(r.novel_top1) && unit(r.base_top1) && unit(r.novel_recall),
               ErrorCode::kInvariant, "evaluation produced an accuracy outside [0, 1]");
  std::size_t total = 0;
  for (const lbp::ConfusionRow& row : r.confusion) {
    for (std::size_t n : row.counts) total += n;
  }
  lbp::require(total == r.novel_instances + r.base_instances, ErrorCode::kInvariant,
               "confusion counts do not add up to the instance counts");
  for (double f : r.shrinking_factors) {
    lbp::require(f >= 0.0 && f <= 1.0, ErrorCode::kInvariant, "shrinking factor outside [0, 1]");
  }
}

}  // namespace

extern "C" {

const char* lbp_version(void) { return "1.0.0"; }

const char* lbp_status_string(lbp_status status) {
  switch (status) {
    case LBP_OK: return "ok";
    case LBP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LBP_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case LBP_ERR_OUT_OF_RANGE: return "out of range";
    case LBP_ERR_NON_FINITE: return "non-finite value";
    case LBP_ERR_INFEASIBLE: return "infeasible";
    case LBP_ERR_IO: return "i/o error";
    case LBP_ERR_FORMAT: return "format error";
    case LBP_ERR_INVARIANT: return "invariant violation";
    case LBP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* lbp_last_error(void) { return g_last_error.c_str(); }

void lbp_string_free(char* s) { std::free(s); }

// ---- configuration ----

lbp_status lbp_config_default(lbp_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new lbp_config{};
  });
}

lbp_status lbp_config_parse(const char* text, lbp_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new lbp_config{lbp::parse_lab_config(text)};
  });
}

lbp_status lbp_config_load(const char* path, lbp_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new lbp_config{lbp::parse_lab_config(lbp::read_file(path))};
  });
}

lbp_status lbp_config_override(lbp_config* config, const char* assignment) {
  return guarded([&] {
    need(config, "config");
    need(assignment, "assignment");
    lbp::apply_override(config->value, assignment);
  });
}

lbp_status lbp_config_set_seed(lbp_config* config, uint64_t seed) {
  return guarded([&] {
    need(config, "config");
    config->value.scenario.seed = seed;
    config->value.train.seed = seed;
    config->value.ablation.base_seed = seed;
    config->value.gradcheck.seed = seed;
  });
}

lbp_status lbp_config_render(const lbp_config* config, char** out) {
  return guarded([&] {
    need(config, "config");
    emit(out, lbp::render_lab_config(config->value));
  });
}

lbp_status lbp_config_hash(const lbp_config* config, uint64_t* out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = lbp::config_hash(config->value);
  });
}

void lbp_config_free(lbp_config* config) { delete config; }

// ---- datasets ----

lbp_status lbp_scenario_generate(const lbp_config* config, lbp_dataset** train, lbp_dataset** infer) {
  return guarded([&] {
    need(config, "config");
    need(train, "train");
    need(infer, "infer");
    lbp::Scenario s = lbp::generate_scenario(config->value.scenario);
    auto* t = new lbp_dataset{std::move(s.train)};
    *infer = new lbp_dataset{std::move(s.infer)};
    *train = t;
  });
}

lbp_status lbp_dataset_load(const char* path, lbp_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new lbp_dataset{lbp::parse_dataset(lbp::read_file(path))};
  });
}

lbp_status lbp_dataset_save(const lbp_dataset* dataset, const char* path) {
  return guarded([&] {
    need(dataset, "dataset");
    need(path, "path");
    lbp::write_file(path, lbp::render_dataset(dataset->value));
  });
}

lbp_status lbp_dataset_render(const lbp_dataset* dataset, char** out) {
  return guarded([&] {
    need(dataset, "dataset");
    emit(out, lbp::render_dataset(dataset->value));
  });
}

lbp_status lbp_dataset_split(const lbp_dataset* dataset, char** out) {
  return guarded([&] {
    need(dataset, "dataset");
    emit(out, dataset->value.split);
  });
}

lbp_status lbp_dataset_proposal_count(const lbp_dataset* dataset, size_t* out) {
  return guarded([&] {
    need(dataset, "dataset");
    need(out, "out");
    *out = dataset->value.proposals.size();
  });
}

void lbp_dataset_free(lbp_dataset* dataset) { delete dataset; }

// ---- discovery and training ----

lbp_status lbp_estimate_k(const lbp_config* config, const lbp_dataset* train, size_t* k, char** json,
                          char** text) {
  return guarded([&] {
    need(config, "config");
    need(train, "train");
    lbp::TrainConfig tc = config->value.train;
    tc.baseline_mode = false;
    tc.n_o = 0;
    const lbp::DiscoveryResult d = lbp::discover_background_categories(train->value, tc);
    if (k) *k = d.n_estimated;
    emit(json, lbp::render_count_estimate(d));
    emit(text, lbp::format_count_estimate(d));
  });
}

lbp_status lbp_train(const lbp_config* config, const lbp_dataset* train, lbp_checkpoint** out,
                     char** history) {
  return guarded([&] {
    need(config, "config");
    need(train, "train");
    need(out, "out");
    lbp::TrainResult r = lbp::train(config->value.train, train->value);
    emit(history, lbp::render_history(r.history));
    *out = new lbp_checkpoint{std::move(r.checkpoint)};
  });
}

lbp_status lbp_checkpoint_load(const char* path, lbp_checkpoint** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new lbp_checkpoint{lbp::parse_checkpoint(lbp::read_file(path))};
  });
}

lbp_status lbp_checkpoint_save(const lbp_checkpoint* checkpoint, const char* path) {
  return guarded([&] {
    need(checkpoint, "checkpoint");
    need(path, "path");
    lbp::write_file(path, lbp::render_checkpoint(checkpoint->value));
  });
}

lbp_status lbp_checkpoint_render(const lbp_checkpoint* checkpoint, char** out) {
  return guarded([&] {
    need(checkpoint, "checkpoint");
    emit(out, lbp::render_checkpoint(checkpoint->value));
  });
}

lbp_status lbp_checkpoint_losses(const lbp_checkpoint* checkpoint, double* initial, double* final_loss) {
  return guarded([&] {
    need(checkpoint, "checkpoint");
    if (initial) *initial = checkpoint->value.initial_loss;
    if (final_loss) *final_loss = checkpoint->value.final_loss;
  });
}

void lbp_checkpoint_free(lbp_checkpoint* checkpoint) { delete checkpoint; }

// ---- evaluation and reports ----

lbp_status lbp_evaluate(const lbp_config* config, const lbp_checkpoint* checkpoint,
                        const lbp_dataset* infer, int rectify, double* novel_top1, char** json,
                        char** text) {
  return guarded([&] {
    need(config, "config");
    need(checkpoint, "checkpoint");
    need(infer, "infer");
    lbp::require(rectify >= -1 && rectify <= 1, lbp::ErrorCode::kInvalidArgument,
                 "rectify must be -1, 0 or 1");
    lbp::EvalConfig ec = config->value.eval;
    if (rectify >= 0) ec.rectify = rectify == 1;
    const lbp::EvalReport r = lbp::evaluate(checkpoint->value, infer->value, ec);
    check_report(r);
    if (novel_top1) *novel_top1 = r.novel_top1;
    emit(json, lbp::render_eval_report(r));
    emit(text, lbp::format_eval_report(r));
  });
}

lbp_status lbp_rectify_report(const lbp_checkpoint* checkpoint, const lbp_dataset* infer,
                              size_t max_proposals, char** json, char** text) {
  return guarded([&] {
    need(checkpoint, "checkpoint");
    need(infer, "infer");
    const lbp::RectifyReport r = lbp::rectify_report(checkpoint->value, infer->value, max_proposals);
    for (double f : r.factors) {
      lbp::require(f >= 0.0 && f <= 1.0, lbp::ErrorCode::kInvariant, "shrinking factor outside [0, 1]");
    }
    emit(json, lbp::render_rectify_report(r));
    emit(text, lbp::format_rectify_report(r));
  });
}

lbp_status lbp_ablate(const lbp_config* config, char** json, char** text) {
  return guarded([&] {
    need(config, "config");
    const lbp::LabConfig& c = config->value;
    const lbp::AblationTable t = lbp::run_ablation(c.ablation, c.scenario, c.train, c.eval);
    for (const lbp::AblationRow& row : t.rows) check_report(row.report);
    emit(json, lbp::render_ablation(t));
    emit(text, lbp::format_ablation(t));
  });
}

lbp_status lbp_gradcheck(const lbp_config* config, int* all_pass, char** json, char** text) {
  return guarded([&] {
    need(config, "config");
    const lbp::GradcheckTable t = lbp::run_gradcheck(config->value.gradcheck);
    if (all_pass) *all_pass = t.all_pass() ? 1 : 0;
    emit(json, lbp::render_gradcheck(t));
    emit(text, lbp::format_gradcheck(t));
  });
}

lbp_status lbp_write_report_dir(const char* dir, const char* command, const char* const* names,
                                const char* const* contents, size_t count, uint64_t config_hash) {
  return guarded([&] {
    need(dir, "dir");
    need(command, "command");
    if (count > 0) {
      need(names, "names");
      need(contents, "contents");
    }
    std::vector<lbp::Artifact> artifacts;
    for (size_t i = 0; i < count; ++i) {
      need(names[i], "artifact name");
      need(contents[i], "artifact content");
      artifacts.push_back({names[i], contents[i]});
    }
    lbp::write_report_dir(dir, artifacts, command, config_hash);
  });
}

// ---- primitives ----

lbp_status lbp_cosine(const double* a, const double* b, size_t dim, double* out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    const lbp::Embedding ea(std::vector<double>(a, a + dim));
    const lbp::Embedding eb(std::vector<double>(b, b + dim));
    *out = lbp::cosine(ea, eb);
  });
}

lbp_status lbp_softmax_probs(const double* w, const double* embeddings, size_t n, size_t dim, double tau,
                             double* out) {
  return guarded([&] {
    need(w, "w");
    need(embeddings, "embeddings");
    need(out, "out");
    const lbp::Embedding q(std::vector<double>(w, w + dim));
    std::vector<lbp::Embedding> cats;
    for (size_t i = 0; i < n; ++i) {
      cats.emplace_back(std::vector<double>(embeddings + i * dim, embeddings + (i + 1) * dim));
    }
    const std::vector<double> p = lbp::softmax_probs(q, cats, lbp::Temperature(tau));
    std::memcpy(out, p.data(), p.size() * sizeof(double));
  });
}

}  // extern "C"
