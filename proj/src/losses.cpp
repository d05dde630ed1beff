// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/losses.hpp"

#include <cmath>

namespace lbp {

HeadOutput evaluate_head(const Embedding& feature, const Vocabulary& vocab, Temperature tau) {
  HeadOutput out;
  out.logits = cosine_logits(feature, vocab.embeddings(), tau);
  out.log_probs = log_softmax(out.logits);
  return out;
}

TargetTerm target_set_loss(std::span<const double> log_probs, std::span<const std::size_t> targets,
                           TargetRule rule) {
  require(!targets.empty(), ErrorCode::kInvalidArgument, "target set is empty");
  TargetTerm t;
  t.dlogits.resize(log_probs.size());
  for (std::size_t j = 0; j < log_probs.size(); ++j) t.dlogits[j] = std::exp(log_probs[j]);

  if (rule == TargetRule::kMass) {
    std::vector<double> sel;
    sel.reserve(targets.size());
    for (std::size_t c : targets) sel.push_back(log_probs[c]);
    const double log_mass = logsumexp(sel);
    t.value = -log_mass;
    for (std::size_t c : targets) t.dlogits[c] -= std::exp(log_probs[c] - log_mass);
  } else {
    const double n = static_cast<double>(targets.size());
    double s = 0.0;
    for (std::size_t c : targets) {
      s -= log_probs[c];
      t.dlogits[c] -= 1.0 / n;
    }
    t.value = s / n;
  }
  return t;
}

void backprop_logits(const Embedding& feature, const Vocabulary& vocab, Temperature tau,
                     std::span<const double> dlogits, double weight, EmbeddingGrad* grad,
                     std::vector<double>* dfeature) {
  const double inv_tau = 1.0 / tau.value();
  const std::size_t d = feature.dim();
  if (dfeature && dfeature->empty()) dfeature->assign(d, 0.0);
  for (std::size_t j = 0; j < vocab.size(); ++j) {
    const double g = weight * dlogits[j] * inv_tau;
    if (g == 0.0) continue;
    const Embedding& t = vocab.embedding(j);
    if (grad) {
      const std::vector<double> dc = cosine_grad_first(t, feature);
      auto& acc = grad->wrt_embedding[j];
      for (std::size_t k = 0; k < d; ++k) acc[k] += g * dc[k];
    }
    if (dfeature) {
      const std::vector<double> dc = cosine_grad_first(feature, t);
      for (std::size_t k = 0; k < d; ++k) (*dfeature)[k] += g * dc[k];
    }
  }
}

std::vector<std::size_t> indices_of(Block b) {
  std::vector<std::size_t> out;
  for (std::size_t i = b.begin; i < b.end; ++i) out.push_back(i);
  return out;
}

std::vector<std::size_t> indices_of(Block a, Block b) {
  std::vector<std::size_t> out = indices_of(a);
  for (std::size_t i = b.begin; i < b.end; ++i) out.push_back(i);
  return out;
}

double background_mass(std::span<const double> probs, const Vocabulary& vocab) {
  require(probs.size() == vocab.size(), ErrorCode::kDimensionMismatch,
          "probability vector does not match the vocabulary");
  const Block bg = vocab.background_block();
  return compensated_sum(probs.subspan(bg.begin, bg.size()));
}

Branch select_branch(double mass, double gamma) {
  return mass >= gamma ? Branch::kBcp : Branch::kRlx;
}

namespace {

std::vector<double>* feature_slot(EmbeddingGrad* grad, bool foreground, std::size_t i,
                                  std::size_t n) {
  if (!grad || !grad->track_features) return nullptr;
  auto& v = foreground ? grad->wrt_foreground : grad->wrt_background;
  if (v.size() != n) v.assign(n, {});
  return &v[i];
}

std::size_t label_index(const Proposal& p, const Vocabulary& vocab) {
  require(p.gt_label.has_value(), ErrorCode::kInvalidArgument, "foreground proposal has no label");
  const auto idx = vocab.index_of_named(*p.gt_label);
  require(idx.has_value() && vocab.base_block().contains(*idx), ErrorCode::kInvalidArgument,
          "foreground label is not a base category of the vocabulary");
  return *idx;
}

// Mean over the background set of one target rule applied to one index set.
LossValue background_set_loss(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                              const std::vector<std::size_t>& targets, TargetRule rule,
                              EmbeddingGrad* grad) {
  const std::size_t n = batch.background.size();
  if (n == 0) return {0.0, true};
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Proposal& p = batch.background[i];
    const HeadOutput h = evaluate_head(p.detector_feature, vocab, tau);
    const TargetTerm t = target_set_loss(h.log_probs, targets, rule);
    terms[i] = t.value;
    if (grad) {
      backprop_logits(p.detector_feature, vocab, tau, t.dlogits, 1.0 / double(n), grad,
                      feature_slot(grad, false, i, n));
    }
  }
  return {compensated_sum(terms) / double(n), false};
}

}  // namespace

LossValue loss_cls(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                   EmbeddingGrad* grad) {
  const std::size_t n = batch.foreground.size();
  if (n == 0) return {0.0, true};
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Proposal& p = batch.foreground[i];
    const std::size_t y = label_index(p, vocab);
    const HeadOutput h = evaluate_head(p.detector_feature, vocab, tau);
    const TargetTerm t = target_set_loss(h.log_probs, std::span<const std::size_t>(&y, 1),
                                         TargetRule::kMass);
    terms[i] = t.value;
    if (grad) {
      backprop_logits(p.detector_feature, vocab, tau, t.dlogits, 1.0 / double(n), grad,
                      feature_slot(grad, true, i, n));
    }
  }
  return {compensated_sum(terms) / double(n), false};
}

LossValue loss_bcp(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                   EmbeddingGrad* grad) {
  return background_set_loss(batch, vocab, tau, indices_of(vocab.background_block()),
                             TargetRule::kMass, grad);
}

LossValue loss_rlx(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                   EmbeddingGrad* grad) {
  return background_set_loss(batch, vocab, tau, indices_of(vocab.background_block()),
                             TargetRule::kMeanNll, grad);
}

BranchedLoss loss_bcp_prime(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                            double gamma, EmbeddingGrad* grad, std::span<const Branch> forced) {
  require(gamma >= 0.0 && gamma <= 1.0, ErrorCode::kOutOfRange, "gamma must lie in [0, 1]");
  const std::size_t n = batch.background.size();
  require(forced.empty() || forced.size() == n, ErrorCode::kInvalidArgument,
          "forced branch list does not match the batch");
  BranchedLoss out;
  if (n == 0) {
    out.empty = true;
    return out;
  }
  const std::vector<std::size_t> targets = indices_of(vocab.background_block());
  std::vector<double> terms(n);
  out.branches.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Proposal& p = batch.background[i];
    const HeadOutput h = evaluate_head(p.detector_feature, vocab, tau);
    std::vector<double> probs(h.log_probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) probs[j] = std::exp(h.log_probs[j]);
    const Branch b = forced.empty() ? select_branch(background_mass(probs, vocab), gamma) : forced[i];
    out.branches[i] = b;
    const TargetTerm t = target_set_loss(
        h.log_probs, targets, b == Branch::kBcp ? TargetRule::kMass : TargetRule::kMeanNll);
    terms[i] = t.value;
    if (grad) {
      backprop_logits(p.detector_feature, vocab, tau, t.dlogits, 1.0 / double(n), grad,
                      feature_slot(grad, false, i, n));
    }
  }
  out.value = compensated_sum(terms) / double(n);
  return out;
}

}  // namespace lbp
