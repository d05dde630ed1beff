// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lbp/ipr.hpp"
#include "lbp/synth.hpp"
#include "lbp/trainer.hpp"

namespace lbp {

struct EvalConfig {
  bool rectify = true;
  double recall_threshold = 0.5;

  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

/// Counts of predicted column per true category. Columns follow
/// EvalReport::columns; the last column is background.
struct ConfusionRow {
  int label = 0;
  std::vector<std::size_t> counts;

  friend bool operator==(const ConfusionRow&, const ConfusionRow&) = default;
};

struct EvalReport {
  double novel_top1 = 0.0;
  double base_top1 = 0.0;
  double novel_recall = 0.0;   // correct and scored >= recall_threshold
  double recall_threshold = 0.5;
  std::size_t novel_instances = 0;
  std::size_t base_instances = 0;
  std::vector<int> columns;    // category ids, base then novel; background is implicit last
  std::vector<ConfusionRow> confusion;
  std::vector<double> shrinking_factors;
  double mean_shrinking_factor = 1.0;
  std::size_t bcp_branches = 0;
  std::size_t rlx_branches = 0;
  bool rectified = false;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Scores every object proposal of `infer` (oracle label base or novel) under
/// an inference vocabulary. Background wins when its mass exceeds every
/// foreground probability.
EvalReport evaluate_vocab(const Vocabulary& vocab, const Dataset& infer, double tau,
                          const EvalConfig& config);

EvalReport evaluate(const Checkpoint& checkpoint, const Dataset& infer, const EvalConfig& config);

Vocabulary inference_vocab_from_checkpoint(const Checkpoint& checkpoint, const Dataset& infer);

struct RectifyReport {
  struct ProposalScores {
    int proposal = 0;
    std::vector<double> unrectified;  // over base then novel, as in `columns`
    std::vector<double> rectified;

    friend bool operator==(const ProposalScores&, const ProposalScores&) = default;
  };
  double tau = 0.0;
  std::vector<int> columns;
  std::vector<double> factors;  // per underlying category
  std::vector<ProposalScores> proposals;

  friend bool operator==(const RectifyReport&, const RectifyReport&) = default;
};

RectifyReport rectify_report(const Checkpoint& checkpoint, const Dataset& infer,
                             std::size_t max_proposals);

// ---- ablation ----

enum class Combination { kBaseline, kBcp, kBod, kBcpIpr, kBodIpr, kFull };

const char* to_string(Combination c);
Combination combination_from_string(const std::string& s);

/// Training toggles and the rectify flag a combination stands for.
TrainConfig apply_combination(TrainConfig base, Combination c);
bool uses_ipr(Combination c);

struct AblationSpec {
  std::vector<Combination> combinations{Combination::kBaseline, Combination::kBcp,
                                        Combination::kBod,      Combination::kBcpIpr,
                                        Combination::kBodIpr,   Combination::kFull};
  std::uint64_t base_seed = 1;
  std::size_t repetitions = 10;  // seeds base_seed .. base_seed + repetitions - 1

  friend bool operator==(const AblationSpec&, const AblationSpec&) = default;
};

struct AblationRow {
  Combination combination = Combination::kBaseline;
  std::uint64_t seed = 0;
  std::size_t n_estimated = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  EvalReport report;

  friend bool operator==(const AblationRow&, const AblationRow&) = default;
};

struct AblationTable {
  std::vector<AblationRow> rows;  // seed-major, spec order within a seed

  std::vector<double> novel_top1(Combination c) const;  // per seed, in seed order
  friend bool operator==(const AblationTable&, const AblationTable&) = default;
};

/// Every combination sees the same scenario and training seed. Runs that
/// differ only in the rectify flag share one training run.
AblationTable run_ablation(const AblationSpec& spec, const ScenarioConfig& scenario,
                           const TrainConfig& train, const EvalConfig& eval);

double median(std::vector<double> values);

// ---- gradient oracle table ----

struct GradcheckConfig {
  std::size_t instances = 50;
  std::vector<double> taus{1.0, 0.05};
  double h = 1e-5;
  std::uint64_t seed = 1;

  friend bool operator==(const GradcheckConfig&, const GradcheckConfig&) = default;
};

/// Relative error allowed at a temperature: 1e-5 at tau >= 1, 1e-4 below.
double gradcheck_tolerance(double tau);

struct GradcheckRow {
  Objective objective = Objective::kFinal;
  double tau = 1.0;
  std::size_t instance = 0;
  double relative_error = 0.0;
  double tolerance = 0.0;
  bool straddle = false;
  bool pass = false;  // straddling instances are reported, never failed
};

struct GradcheckTable {
  std::vector<GradcheckRow> rows;

  bool all_pass() const;
  std::size_t straddles() const;
};

/// Seeded random instance: small encoder, vocabulary, batch and partition.
struct GradcheckInstance {
  std::shared_ptr<const MockTextEncoder> encoder;
  ObjectiveContext context;
  TrainParams params;
  ProposalBatch batch;
  BackgroundPartition partition;
  TrainConfig config;
};

GradcheckInstance make_gradcheck_instance(std::uint64_t seed, double tau);

/// ||a - b|| / max(||a||, ||b||, 1e-12).
double relative_error(const Gradients& a, const Gradients& b);

GradcheckTable run_gradcheck(const GradcheckConfig& config);

}  // namespace lbp
