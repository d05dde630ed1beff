// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lbp/discovery.hpp"
#include "lbp/losses.hpp"

namespace lbp {

struct PseudoLabel {
  std::size_t proposal = 0;  // index into the filtered proposal list
  std::size_t cls = 0;       // index into C_O' (< n_o)
  double score = 0.0;        // p~ of the chosen class
};

struct PositiveBackground {
  Proposal proposal;
  PseudoLabel label;
};

/// N^B_p and N^B_n for one batch.
struct BackgroundPartition {
  std::vector<PositiveBackground> positives;
  std::vector<Proposal> negatives;
};

std::vector<double> center_probs(const Embedding& clip_feature, std::span<const Embedding> centers,
                                 Temperature tau);

PseudoLabel assign_pseudo_label(const Embedding& clip_feature, std::span<const Embedding> centers,
                                Temperature tau);

/// Box refinement applied to surviving pseudo labels. Identity by default;
/// there is no trained box head here.
using BoxRefiner = std::function<Box(const Proposal&, const PseudoLabel&)>;

struct PseudoLabelConfig {
  BackgroundFilter filter;   // RPN / GT / NMS gate shared with discovery
  double theta = 0.95;       // pseudo-score threshold
  double nms_iou = 0.5;      // per-class NMS
};

/// Filter -> label from I(x) -> drop score < theta -> per-class NMS on the
/// pseudo score -> refine. Survivors are N^B_p; every other filtered
/// proposal is N^B_n.
BackgroundPartition generate_pseudo_labels(std::span<const Proposal> background,
                                           std::span<const GroundTruthBox> ground_truth,
                                           std::span<const Embedding> centers, Temperature tau,
                                           const PseudoLabelConfig& config,
                                           const BoxRefiner& refine = {});

/// Positive term: mean of -log p(y^o | x). Negative term: lambda_bg times the
/// mean of -log of the mass on C_a plus the sub-background.
LossValue loss_bod(const BackgroundPartition& partition, const Vocabulary& vocab, Temperature tau,
                   double lambda_bg, EmbeddingGrad* grad = nullptr);

inline constexpr double kDefaultLambdaBg = 0.05;
inline constexpr double kDefaultTheta = 0.95;

}  // namespace lbp
