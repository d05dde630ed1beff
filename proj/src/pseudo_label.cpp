// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/pseudo_label.hpp"

#include <map>

namespace lbp {

std::vector<double> center_probs(const Embedding& clip_feature, std::span<const Embedding> centers,
                                 Temperature tau) {
  require(!centers.empty(), ErrorCode::kInvalidArgument, "center_probs: no cluster centers");
  return softmax_probs(clip_feature, centers, tau);
}

PseudoLabel assign_pseudo_label(const Embedding& clip_feature, std::span<const Embedding> centers,
                                Temperature tau) {
  const std::vector<double> p = center_probs(clip_feature, centers, tau);
  PseudoLabel label;
  label.cls = argmax(p);
  label.score = p[label.cls];
  return label;
}

BackgroundPartition generate_pseudo_labels(std::span<const Proposal> background,
                                           std::span<const GroundTruthBox> ground_truth,
                                           std::span<const Embedding> centers, Temperature tau,
                                           const PseudoLabelConfig& config,
                                           const BoxRefiner& refine) {
  require(config.theta > 0.0 && config.theta < 1.0, ErrorCode::kOutOfRange,
          "pseudo-label theta must lie in (0, 1)");
  const std::vector<Proposal> filtered =
      filter_background_proposals(background, ground_truth, config.filter);

  // Confident labels grouped by class; NMS runs per class (and per image).
  std::vector<PseudoLabel> labels(filtered.size());
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    labels[i] = assign_pseudo_label(filtered[i].clip_feature, centers, tau);
    labels[i].proposal = i;
    if (labels[i].score >= config.theta) by_class[labels[i].cls].push_back(i);
  }

  std::vector<char> positive(filtered.size(), 0);
  for (const auto& [cls, members] : by_class) {
    std::vector<Proposal> group;
    std::vector<double> scores;
    for (std::size_t i : members) {
      group.push_back(filtered[i]);
      group.back().id = static_cast<int>(i);  // carry the local index through nms
      scores.push_back(labels[i].score);
    }
    for (const Proposal& kept : nms(group, config.nms_iou, ScoreKey::kPseudo, scores)) {
      positive[static_cast<std::size_t>(kept.id)] = 1;
    }
  }

  BackgroundPartition out;
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    if (positive[i]) {
      PositiveBackground pb{filtered[i], labels[i]};
      if (refine) pb.proposal.box = refine(pb.proposal, pb.label);
      out.positives.push_back(std::move(pb));
    } else {
      out.negatives.push_back(filtered[i]);
    }
  }
  return out;
}

LossValue loss_bod(const BackgroundPartition& partition, const Vocabulary& vocab, Temperature tau,
                   double lambda_bg, EmbeddingGrad* grad) {
  require(lambda_bg >= 0.0, ErrorCode::kOutOfRange, "lambda_bg must be >= 0");
  const Block estimated = vocab.estimated_block();
  double value = 0.0;
  bool any = false;

  const std::size_t np = partition.positives.size();
  if (np > 0) {
    any = true;
    std::vector<double> terms(np);
    for (std::size_t i = 0; i < np; ++i) {
      const PositiveBackground& pb = partition.positives[i];
      require(pb.label.cls < estimated.size(), ErrorCode::kOutOfRange,
              "pseudo label outside the estimated underlying block");
      const std::size_t y = estimated.begin + pb.label.cls;
      const HeadOutput h = evaluate_head(pb.proposal.detector_feature, vocab, tau);
      const TargetTerm t = target_set_loss(h.log_probs, std::span<const std::size_t>(&y, 1),
                                           TargetRule::kMass);
      terms[i] = t.value;
      if (grad) {
        backprop_logits(pb.proposal.detector_feature, vocab, tau, t.dlogits, 1.0 / double(np), grad,
                        nullptr);
      }
    }
    value += compensated_sum(terms) / double(np);
  }

  const std::size_t nn = partition.negatives.size();
  if (nn > 0) {
    any = true;
    std::vector<std::size_t> targets = indices_of(vocab.expansion_block());
    targets.push_back(vocab.sub_background_index());
    std::vector<double> terms(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      const Proposal& p = partition.negatives[i];
      const HeadOutput h = evaluate_head(p.detector_feature, vocab, tau);
      const TargetTerm t = target_set_loss(h.log_probs, targets, TargetRule::kMass);
      terms[i] = t.value;
      if (grad) {
        backprop_logits(p.detector_feature, vocab, tau, t.dlogits, lambda_bg / double(nn), grad,
                        nullptr);
      }
    }
    value += lambda_bg * compensated_sum(terms) / double(nn);
  }
  return {value, !any};
}

}  // namespace lbp
