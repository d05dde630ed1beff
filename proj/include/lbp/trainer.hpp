// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lbp/discovery.hpp"
#include "lbp/encoder.hpp"
#include "lbp/losses.hpp"
#include "lbp/pseudo_label.hpp"
#include "lbp/synth.hpp"
#include "lbp/vocabulary.hpp"

namespace lbp {

struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 2.5e-5;
  std::size_t steps = 200;
  std::size_t batch_images = 8;
  std::uint64_t seed = 1;

  double tau = 0.02;
  double gamma = 0.02;
  double theta = 0.95;       // pseudo-label score threshold
  double lambda_bg = 0.05;
  std::size_t n_a = 10;
  std::size_t n_o = 0;       // 0: estimate from the background proposals
  std::size_t k_min = 2;
  std::size_t k_max = 10;

  BackgroundFilter filter;   // RPN theta, GT cut and NMS for background proposals
  double pseudo_nms_iou = 0.5;

  bool bcp = true;
  bool bod = true;
  bool baseline_mode = false;
  bool train_contexts = true;
  bool train_sub_background = true;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void validate(const TrainConfig& config);

struct TrainParams {
  std::vector<ContextVector> contexts;
  SubBackgroundEmbedding sub_background;

  std::size_t size() const;  // number of scalar parameters
  /// Flat view in (contexts..., sub_background) order.
  double get(std::size_t i) const;
  void set(std::size_t i, double v);

  friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

struct Gradients {
  std::vector<std::vector<double>> contexts;
  std::vector<double> sub_background;

  static Gradients zeros_like(const TrainParams& p);
  double get(std::size_t i) const;
  void set(std::size_t i, double v);
  double norm() const;
  bool is_finite() const;
};

struct LossBreakdown {
  double l_cls = 0.0;
  double l_bcp_prime = 0.0;
  double l_bod = 0.0;
  double l_final = 0.0;
  std::vector<Branch> branches;  // per background proposal of the batch

  std::size_t count(Branch b) const;
};

/// Frozen inputs of the objective: encoder, base categories, vocabulary
/// shape. Cluster centers live with the partition, not here.
struct ObjectiveContext {
  const MockTextEncoder* encoder = nullptr;
  std::vector<NamedCategory> base;
  VocabularyShape shape;
};

Vocabulary snapshot_vocab(const ObjectiveContext& ctx, const TrainParams& params);

/// Which objective to differentiate; everything but kFinal ignores toggles.
enum class Objective { kCls, kBcp, kRlx, kBcpPrime, kBod, kFinal };

const char* to_string(Objective o);

LossBreakdown loss_final(const ProposalBatch& batch, const Vocabulary& vocab,
                         const BackgroundPartition& partition, const TrainConfig& config,
                         EmbeddingGrad* grad = nullptr, std::span<const Branch> forced = {});

double evaluate_objective(Objective which, const ProposalBatch& batch, const Vocabulary& vocab,
                          const BackgroundPartition& partition, const TrainConfig& config,
                          EmbeddingGrad* grad = nullptr, std::span<const Branch> forced = {},
                          std::vector<Branch>* branches = nullptr);

/// Chains vocabulary-embedding gradients back to the trainable parameters.
Gradients embedding_to_param_grads(const EmbeddingGrad& grad, const Vocabulary& vocab,
                                   const ObjectiveContext& ctx, const TrainParams& params,
                                   const TrainConfig& config);

struct GradientResult {
  LossBreakdown loss;
  Gradients grads;
};

GradientResult compute_gradients(const ProposalBatch& batch, const BackgroundPartition& partition,
                                 const ObjectiveContext& ctx, const TrainParams& params,
                                 const TrainConfig& config);

/// Analytic gradient of one objective (used by the gradient oracle checks).
Gradients objective_gradients(Objective which, const ProposalBatch& batch,
                              const BackgroundPartition& partition, const ObjectiveContext& ctx,
                              const TrainParams& params, const TrainConfig& config,
                              std::span<const Branch> forced = {});

/// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h over every scalar parameter.
Gradients finite_diff_gradients(const std::function<double(const TrainParams&)>& f,
                                const TrainParams& params, double h);

struct FiniteDiffCheck {
  Gradients grads;
  std::vector<Branch> center_branches;
  bool branch_straddle = false;      // some stencil point selected a different branch
  std::size_t straddle_parameter = 0;
};

/// Central differences of one objective with the branch selection held at
/// the center point; flags stencils that cross the gamma boundary.
FiniteDiffCheck finite_diff_gradients(Objective which, const ProposalBatch& batch,
                                      const BackgroundPartition& partition,
                                      const ObjectiveContext& ctx, const TrainParams& params,
                                      const TrainConfig& config, double h);

struct Velocity {
  std::vector<std::vector<double>> contexts;
  std::vector<double> sub_background;

  static Velocity zeros_like(const TrainParams& p);
};

/// v <- m v + g + wd p;  p <- p - lr v;  sub-background re-projected to unit length.
void sgd_step(TrainParams& params, Velocity& velocity, const Gradients& grads, double lr,
              double momentum, double weight_decay, bool update_contexts = true,
              bool update_sub_background = true);

struct StepRecord {
  LossBreakdown loss;  // branches cleared; counts kept below
  std::size_t bcp_branches = 0;
  std::size_t rlx_branches = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

struct TrainHistory {
  std::vector<StepRecord> steps;
};

/// Offline discovery result the trainer starts from.
struct DiscoveryResult {
  std::size_t n_estimated = 0;
  bool estimated = false;          // false when n_o came from the config
  CountEstimate estimate;
  std::vector<Embedding> centers;  // k-means centers over C_O'
  std::size_t filtered_proposals = 0;
};

DiscoveryResult discover_background_categories(const Dataset& train, const TrainConfig& config);

struct Checkpoint {
  static constexpr int kFormatVersion = 1;
  TrainConfig config;
  EncoderConfig encoder;
  std::vector<CategoryInfo> base_categories;
  std::size_t n_estimated = 0;
  std::size_t n_expansion = 0;
  TrainParams params;
  std::vector<Embedding> centers;
  std::string rng_state;
  std::uint64_t dataset_hash = 0;
  std::size_t steps_completed = 0;
  std::size_t bcp_branches = 0;
  std::size_t rlx_branches = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct TrainResult {
  TrainHistory history;
  Checkpoint checkpoint;
  DiscoveryResult discovery;
};

TrainResult train(const TrainConfig& config, const Dataset& train_set);

/// Base categories as NamedCategory, embedded by the checkpoint's encoder.
std::vector<NamedCategory> embed_categories(const MockTextEncoder& encoder,
                                            std::span<const CategoryInfo> categories);

Vocabulary training_vocab_from_checkpoint(const Checkpoint& ckpt, const MockTextEncoder& encoder);

}  // namespace lbp
