// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/ipr.hpp"

#include <array>
#include <cmath>

namespace lbp {

namespace {

void require_inference(const Vocabulary& vocab) {
  require(vocab.is_inference(), ErrorCode::kInvalidArgument,
          "inference-time probabilities need a vocabulary from build_inference_vocab");
}

LogScore block_sum(std::span<const double> logits, Block b) {
  return LogScore{logsumexp(logits.subspan(b.begin, b.size()))};
}

// cos(t_{c'}, t_c)/tau against every category except c' itself, and the
// subset of those that are not novel.
struct ConditionalRow {
  std::vector<double> all_others;
  std::vector<double> non_novel_others;
  double log_total = 0.0;
};

ConditionalRow conditional_row(std::size_t row, const Vocabulary& vocab, Temperature tau) {
  ConditionalRow r;
  const Embedding& anchor = vocab.embedding(row);
  for (std::size_t c = 0; c < vocab.size(); ++c) {
    if (c == row) continue;
    const double z = cosine(anchor, vocab.embedding(c)) / tau.value();
    r.all_others.push_back(z);
    if (!vocab.novel_block().contains(c)) r.non_novel_others.push_back(z);
  }
  r.log_total = logsumexp(r.all_others);
  return r;
}

std::size_t underlying_row(const CategoryId& id, const Vocabulary& vocab) {
  require(id.kind == CategoryKind::kUnderlying, ErrorCode::kInvalidArgument,
          "expected an underlying category");
  const auto idx = vocab.index_of(id);
  require(idx.has_value(), ErrorCode::kInvalidArgument, "underlying category not in the vocabulary");
  return *idx;
}

}  // namespace

double PartialSums::log_total() const {
  const std::array<double, 3> parts{base_novel.log, underlying.log, sub_background.log};
  return logsumexp(parts);
}

PartialSums partial_sums(const Embedding& w, const Vocabulary& vocab, Temperature tau) {
  require_inference(vocab);
  const std::vector<double> z = cosine_logits(w, vocab.embeddings(), tau);
  PartialSums s;
  s.base_novel = block_sum(z, {vocab.base_block().begin, vocab.novel_block().end});
  s.underlying = block_sum(z, vocab.underlying_block());
  s.sub_background = LogScore{z[vocab.sub_background_index()]};
  return s;
}

double conditional_prob(const CategoryId& novel, const CategoryId& underlying, const Vocabulary& vocab,
                        Temperature tau) {
  require_inference(vocab);
  require(novel.kind == CategoryKind::kNovel, ErrorCode::kInvalidArgument, "expected a novel category");
  const auto col = vocab.index_of(novel);
  require(col.has_value(), ErrorCode::kInvalidArgument, "novel category not in the vocabulary");
  const std::size_t row = underlying_row(underlying, vocab);
  const ConditionalRow r = conditional_row(row, vocab, tau);
  const double z = cosine(vocab.embedding(row), vocab.embedding(*col)) / tau.value();
  return std::exp(z - r.log_total);
}

double shrinking_factor(const CategoryId& underlying, const Vocabulary& vocab, Temperature tau) {
  require_inference(vocab);
  const ConditionalRow r = conditional_row(underlying_row(underlying, vocab), vocab, tau);
  return std::exp(logsumexp(r.non_novel_others) - r.log_total);
}

ShrinkingFactors::ShrinkingFactors(const Vocabulary& vocab, Temperature tau) : tau_(tau.value()) {
  require_inference(vocab);
  const Block u = vocab.underlying_block();
  for (std::size_t row = u.begin; row < u.end; ++row) {
    const ConditionalRow r = conditional_row(row, vocab, tau);
    const double lf = logsumexp(r.non_novel_others) - r.log_total;
    log_factors_.push_back(lf);
    factors_.push_back(std::exp(lf));
  }
}

RectifiedSigma rectified_sigma_o(const Embedding& w, const Vocabulary& vocab, Temperature tau,
                                 const ShrinkingFactors* cache) {
  require_inference(vocab);
  const ShrinkingFactors local = cache ? ShrinkingFactors(*cache) : ShrinkingFactors(vocab, tau);
  require(local.tau() == tau.value(), ErrorCode::kInvalidArgument,
          "shrinking-factor cache was built at a different temperature");
  const Block u = vocab.underlying_block();
  require(local.factors().size() == u.size(), ErrorCode::kInvalidArgument,
          "shrinking-factor cache does not match the vocabulary");
  std::vector<double> terms;
  for (std::size_t i = 0; i < u.size(); ++i) {
    terms.push_back(cosine(w, vocab.embedding(u.begin + i)) / tau.value() + local.log_factors()[i]);
  }
  return {LogScore{logsumexp(terms)}, local.factors()};
}

RectifiedScores inference_probs(const Embedding& w, const Vocabulary& vocab, Temperature tau,
                                bool rectify, const ShrinkingFactors* cache) {
  require_inference(vocab);
  const std::vector<double> z = cosine_logits(w, vocab.embeddings(), tau);
  const Block fg{vocab.base_block().begin, vocab.novel_block().end};

  RectifiedScores out;
  out.rectified = rectify;
  const LogScore base_novel = block_sum(z, fg);
  const LogScore sub_bg{z[vocab.sub_background_index()]};
  out.sigma_o = block_sum(z, vocab.underlying_block());
  if (rectify) {
    RectifiedSigma rs = rectified_sigma_o(w, vocab, tau, cache);
    out.sigma_o_tilde = rs.sigma_o_tilde;
    out.shrinking_factors = std::move(rs.factors);
  } else {
    out.sigma_o_tilde = out.sigma_o;
    out.shrinking_factors.assign(vocab.underlying_block().size(), 1.0);
  }

  const std::array<double, 3> parts{base_novel.log, out.sigma_o_tilde.log, sub_bg.log};
  const double log_denom = logsumexp(parts);
  for (std::size_t c = fg.begin; c < fg.end; ++c) out.probabilities.push_back(std::exp(z[c] - log_denom));
  const std::array<double, 2> bg{out.sigma_o_tilde.log, sub_bg.log};
  out.background_mass = std::exp(logsumexp(bg) - log_denom);
  return out;
}

}  // namespace lbp
