// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Links only the C API.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbp/lbp.h"

namespace {

constexpr int kExitError = 2;
constexpr int kExitInvariant = 3;

struct CliError {
  lbp_status status;
  std::string message;
};

void check(lbp_status s, const char* what) {
  if (s != LBP_OK) throw CliError{s, std::string(what) + ": " + lbp_last_error()};
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { lbp_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

using ConfigPtr = std::unique_ptr<lbp_config, decltype(&lbp_config_free)>;
using DatasetPtr = std::unique_ptr<lbp_dataset, decltype(&lbp_dataset_free)>;
using CheckpointPtr = std::unique_ptr<lbp_checkpoint, decltype(&lbp_checkpoint_free)>;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_out = true) {
  cmd->add_option("-c,--config", o.config_path, "Configuration file (JSON)");
  cmd->add_option("--seed", o.seed, "Master seed for every seeded component");
  cmd->add_option("--set", o.overrides, "Override a config value: section.key=value");
  if (needs_out) cmd->add_option("-o,--out", o.out_dir, "Report directory")->required();
}

ConfigPtr load_config(const CommonOptions& o) {
  lbp_config* c = nullptr;
  if (o.config_path.empty()) {
    check(lbp_config_default(&c), "default config");
  } else {
    check(lbp_config_load(o.config_path.c_str(), &c), "config");
  }
  ConfigPtr cfg(c, lbp_config_free);
  if (o.seed) check(lbp_config_set_seed(cfg.get(), *o.seed), "seed");
  for (const std::string& s : o.overrides) check(lbp_config_override(cfg.get(), s.c_str()), "override");
  return cfg;
}

DatasetPtr load_dataset(const std::string& path) {
  lbp_dataset* d = nullptr;
  check(lbp_dataset_load(path.c_str(), &d), "dataset");
  return DatasetPtr(d, lbp_dataset_free);
}

CheckpointPtr load_checkpoint(const std::string& path) {
  lbp_checkpoint* c = nullptr;
  check(lbp_checkpoint_load(path.c_str(), &c), "checkpoint");
  return CheckpointPtr(c, lbp_checkpoint_free);
}

std::uint64_t hash_of(const lbp_config* cfg) {
  std::uint64_t h = 0;
  check(lbp_config_hash(cfg, &h), "config hash");
  return h;
}

void write_dir(const std::string& dir, const char* command, const lbp_config* cfg,
               const std::vector<std::pair<std::string, std::string>>& files) {
  OwnedString rendered;
  check(lbp_config_render(cfg, &rendered.p), "config");
  std::vector<const char*> names{"config.json"};
  std::vector<const char*> contents{rendered.p};
  for (const auto& [n, c] : files) {
    names.push_back(n.c_str());
    contents.push_back(c.c_str());
  }
  check(lbp_write_report_dir(dir.c_str(), command, names.data(), contents.data(), names.size(),
                             hash_of(cfg)),
        "report directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lbplab: open-vocabulary detection head lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lbp_version()));

  CommonOptions o;
  std::string dataset_path, checkpoint_path, rectify_mode = "config";
  std::size_t max_proposals = 20;

  auto* show = app.add_subcommand("config", "Print the effective configuration");
  add_common(show, o, false);

  auto* gen = app.add_subcommand("gen", "Generate a scenario: train.jsonl and infer.jsonl");
  add_common(gen, o);

  auto* est = app.add_subcommand("estimate-k", "Estimate the hidden background category count");
  add_common(est, o);
  est->add_option("-d,--dataset", dataset_path, "Training dataset (JSONL)")->required();

  auto* trn = app.add_subcommand("train", "Train contexts and the sub-background embedding");
  add_common(trn, o);
  trn->add_option("-d,--dataset", dataset_path, "Training dataset (JSONL)")->required();

  auto* evl = app.add_subcommand("eval", "Evaluate a checkpoint on the inference dataset");
  add_common(evl, o);
  evl->add_option("-k,--checkpoint", checkpoint_path, "Checkpoint file")->required();
  evl->add_option("-d,--dataset", dataset_path, "Inference dataset (JSONL)")->required();
  evl->add_option("--rectify", rectify_mode, "on, off or config")
      ->check(CLI::IsMember({"on", "off", "config"}));

  auto* rect = app.add_subcommand("rectify-report", "Per-category shrinking factors of a checkpoint");
  add_common(rect, o);
  rect->add_option("-k,--checkpoint", checkpoint_path, "Checkpoint file")->required();
  rect->add_option("-d,--dataset", dataset_path, "Inference dataset naming the novel categories")
      ->required();
  rect->add_option("--max-proposals", max_proposals, "Proposals listed in the report");

  auto* abl = app.add_subcommand("ablate", "Train and evaluate every module combination");
  add_common(abl, o);

  auto* grad = app.add_subcommand("gradcheck", "Analytic versus finite-difference gradients");
  add_common(grad, o);

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigPtr cfg = load_config(o);
    if (show->parsed()) {
      OwnedString s;
      check(lbp_config_render(cfg.get(), &s.p), "config");
      std::cout << s.str();
    } else if (gen->parsed()) {
      lbp_dataset* t = nullptr;
      lbp_dataset* i = nullptr;
      check(lbp_scenario_generate(cfg.get(), &t, &i), "gen");
      DatasetPtr train(t, lbp_dataset_free), infer(i, lbp_dataset_free);
      OwnedString ts, is;
      check(lbp_dataset_render(train.get(), &ts.p), "gen");
      check(lbp_dataset_render(infer.get(), &is.p), "gen");
      write_dir(o.out_dir, "gen", cfg.get(), {{"train.jsonl", ts.str()}, {"infer.jsonl", is.str()}});
      std::size_t nt = 0, ni = 0;
      check(lbp_dataset_proposal_count(train.get(), &nt), "gen");
      check(lbp_dataset_proposal_count(infer.get(), &ni), "gen");
      std::cout << "train proposals " << nt << ", infer proposals " << ni << " -> " << o.out_dir << "\n";
    } else if (est->parsed()) {
      DatasetPtr ds = load_dataset(dataset_path);
      OwnedString js, tx;
      check(lbp_estimate_k(cfg.get(), ds.get(), nullptr, &js.p, &tx.p), "estimate-k");
      write_dir(o.out_dir, "estimate-k", cfg.get(), {{"estimate.json", js.str()}, {"estimate.txt", tx.str()}});
      std::cout << tx.str();
    } else if (trn->parsed()) {
      DatasetPtr ds = load_dataset(dataset_path);
      lbp_checkpoint* c = nullptr;
      OwnedString hist;
      check(lbp_train(cfg.get(), ds.get(), &c, &hist.p), "train");
      CheckpointPtr ckpt(c, lbp_checkpoint_free);
      OwnedString cs;
      check(lbp_checkpoint_render(ckpt.get(), &cs.p), "train");
      write_dir(o.out_dir, "train", cfg.get(), {{"checkpoint.json", cs.str()}, {"history.jsonl", hist.str()}});
      double first = 0.0, last = 0.0;
      check(lbp_checkpoint_losses(ckpt.get(), &first, &last), "train");
      std::cout << "L_final step 1 " << first << " -> last step " << last << "\n";
    } else if (evl->parsed()) {
      CheckpointPtr ckpt = load_checkpoint(checkpoint_path);
      DatasetPtr ds = load_dataset(dataset_path);
      const int rectify = rectify_mode == "on" ? 1 : rectify_mode == "off" ? 0 : -1;
      OwnedString js, tx;
      check(lbp_evaluate(cfg.get(), ckpt.get(), ds.get(), rectify, nullptr, &js.p, &tx.p), "eval");
      write_dir(o.out_dir, "eval", cfg.get(), {{"report.json", js.str()}, {"report.txt", tx.str()}});
      std::cout << tx.str();
    } else if (rect->parsed()) {
      CheckpointPtr ckpt = load_checkpoint(checkpoint_path);
      DatasetPtr ds = load_dataset(dataset_path);
      OwnedString js, tx;
      check(lbp_rectify_report(ckpt.get(), ds.get(), max_proposals, &js.p, &tx.p), "rectify-report");
      write_dir(o.out_dir, "rectify-report", cfg.get(), {{"rectify.json", js.str()}, {"rectify.txt", tx.str()}});
      std::cout << tx.str();
    } else if (abl->parsed()) {
      OwnedString js, tx;
      check(lbp_ablate(cfg.get(), &js.p, &tx.p), "ablate");
      write_dir(o.out_dir, "ablate", cfg.get(), {{"ablation.json", js.str()}, {"ablation.txt", tx.str()}});
      std::cout << tx.str();
    } else if (grad->parsed()) {
      OwnedString js, tx;
      int pass = 0;
      check(lbp_gradcheck(cfg.get(), &pass, &js.p, &tx.p), "gradcheck");
      write_dir(o.out_dir, "gradcheck", cfg.get(), {{"gradcheck.json", js.str()}, {"gradcheck.txt", tx.str()}});
      std::cout << tx.str();
      if (!pass) {
        std::cerr << "gradcheck: analytic and finite-difference gradients disagree\n";
        return kExitInvariant;
      }
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.status == LBP_ERR_INVARIANT ? kExitInvariant : kExitError;
  }
  return 0;
}
