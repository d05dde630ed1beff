// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "lbp/core_math.hpp"
#include "lbp/proposal.hpp"
#include "lbp/vocabulary.hpp"

namespace lbp {

/// P: labeled base proposals. N: everything else the detector saw.
struct ProposalBatch {
  std::vector<Proposal> foreground;
  std::vector<Proposal> background;
};

enum class Branch { kBcp, kRlx };

/// A mean over an empty set is reported as 0 with `empty` set.
struct LossValue {
  double value = 0.0;
  bool empty = false;
};

struct BranchedLoss {
  double value = 0.0;
  bool empty = false;
  std::vector<Branch> branches;  // one per background proposal, batch order
};

/// Accumulates dL/dt for every vocabulary embedding (and optionally dL/dw for
/// each proposal feature, a diagnostic the trainer does not use).
struct EmbeddingGrad {
  std::vector<std::vector<double>> wrt_embedding;
  bool track_features = false;
  std::vector<std::vector<double>> wrt_foreground;  // batch.foreground order
  std::vector<std::vector<double>> wrt_background;  // batch.background order

  EmbeddingGrad() = default;
  explicit EmbeddingGrad(const Vocabulary& vocab)
      : wrt_embedding(vocab.size(), std::vector<double>(vocab.dim(), 0.0)) {}
};

/// Per-proposal probability calculus over a vocabulary.
struct HeadOutput {
  std::vector<double> logits;     // cos(w, t_c) / tau
  std::vector<double> log_probs;  // log p(c | x)
};

HeadOutput evaluate_head(const Embedding& feature, const Vocabulary& vocab, Temperature tau);

/// How a per-proposal loss treats its target index set S.
enum class TargetRule {
  kMass,     // -log sum_{c in S} p(c|x)
  kMeanNll,  // (1/|S|) sum_{c in S} -log p(c|x)
};

struct TargetTerm {
  double value = 0.0;
  std::vector<double> dlogits;  // d value / d logits
};

TargetTerm target_set_loss(std::span<const double> log_probs, std::span<const std::size_t> targets,
                           TargetRule rule);

/// Pushes `weight * dlogits` back through logits = cos(w, t)/tau. Either
/// output may be null.
void backprop_logits(const Embedding& feature, const Vocabulary& vocab, Temperature tau,
                     std::span<const double> dlogits, double weight, EmbeddingGrad* grad,
                     std::vector<double>* dfeature);

std::vector<std::size_t> indices_of(Block b);
std::vector<std::size_t> indices_of(Block a, Block b);

/// p_o^bg: total probability on the underlying block plus the sub-background.
double background_mass(std::span<const double> probs, const Vocabulary& vocab);

Branch select_branch(double background_mass, double gamma);

LossValue loss_cls(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                   EmbeddingGrad* grad = nullptr);
LossValue loss_bcp(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                   EmbeddingGrad* grad = nullptr);
LossValue loss_rlx(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                   EmbeddingGrad* grad = nullptr);

/// BCP where p_o^bg >= gamma, RLX otherwise, per proposal. A non-empty
/// `forced` overrides the selection (used to hold branches fixed while
/// finite differencing).
BranchedLoss loss_bcp_prime(const ProposalBatch& batch, const Vocabulary& vocab, Temperature tau,
                            double gamma, EmbeddingGrad* grad = nullptr,
                            std::span<const Branch> forced = {});

inline constexpr double kDefaultGamma = 0.02;

}  // namespace lbp
