// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "lbp/core_math.hpp"
#include "lbp/vocabulary.hpp"

namespace lbp {

/// Block sums of cosine exponential scores for one proposal. Each sum is
/// kept as a log; linear values can overflow at small temperatures.
struct PartialSums {
  LogScore base_novel;      // Sigma^{b,u}
  LogScore underlying;      // Sigma^o
  LogScore sub_background;  // Sigma^{bg}

  double log_total() const;
};

struct RectifiedScores {
  std::vector<double> probabilities;      // over the base then novel block
  std::vector<double> shrinking_factors;  // over the underlying block
  LogScore sigma_o;
  LogScore sigma_o_tilde;
  double background_mass = 0.0;           // 1 - sum(probabilities)
  bool rectified = false;
};

PartialSums partial_sums(const Embedding& w, const Vocabulary& vocab, Temperature tau);

/// P(c'' | c'): score of the novel category against the underlying one,
/// normalized over every other category of the inference vocabulary.
double conditional_prob(const CategoryId& novel, const CategoryId& underlying, const Vocabulary& vocab,
                        Temperature tau);

/// 1 - sum over novel c'' of P(c'' | c'). Evaluated as the share of the
/// conditional distribution that falls outside the novel block, which is
/// the same quantity without the cancellation.
double shrinking_factor(const CategoryId& underlying, const Vocabulary& vocab, Temperature tau);

/// Proposal-independent, so computed once per inference session.
class ShrinkingFactors {
 public:
  ShrinkingFactors(const Vocabulary& vocab, Temperature tau);

  const std::vector<double>& factors() const noexcept { return factors_; }
  const std::vector<double>& log_factors() const noexcept { return log_factors_; }
  double tau() const noexcept { return tau_; }

 private:
  std::vector<double> factors_;
  std::vector<double> log_factors_;
  double tau_;
};

struct RectifiedSigma {
  LogScore sigma_o_tilde;
  std::vector<double> factors;
};

RectifiedSigma rectified_sigma_o(const Embedding& w, const Vocabulary& vocab, Temperature tau,
                                 const ShrinkingFactors* cache = nullptr);

RectifiedScores inference_probs(const Embedding& w, const Vocabulary& vocab, Temperature tau,
                                bool rectify, const ShrinkingFactors* cache = nullptr);

}  // namespace lbp
