// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

// Small seeded builders shared by the test suites.

#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "lbp/core_math.hpp"
#include "lbp/encoder.hpp"
#include "lbp/losses.hpp"
#include "lbp/proposal.hpp"
#include "lbp/vocabulary.hpp"
#include "oracles.hpp"

namespace fixture {

struct Vocabs {
  std::shared_ptr<lbp::MockTextEncoder> encoder;
  std::vector<lbp::NamedCategory> base;
  std::vector<lbp::NamedCategory> novel;
  std::vector<lbp::ContextVector> contexts;
  lbp::SubBackgroundEmbedding sub_bg;
  lbp::VocabularyShape shape;
  lbp::Vocabulary train;
  lbp::Vocabulary infer;
};

inline lbp::EncoderConfig small_encoder(std::uint64_t seed) {
  lbp::EncoderConfig c;
  c.dim = 12;
  c.context_dim = 6;
  c.hidden = 16;
  c.prefix_dim = 6;
  c.seed = seed;
  return c;
}

/// Base ids 0.., novel ids 100..; contexts drawn N(0, 1) so the underlying
/// embeddings spread over the sphere.
inline Vocabs make_vocabs(std::uint64_t seed, std::size_t n_b, std::size_t n_o, std::size_t n_a,
                          std::size_t n_u, bool baseline = false) {
  Vocabs v;
  v.encoder = std::make_shared<lbp::MockTextEncoder>(small_encoder(seed));
  std::mt19937_64 rng(seed * 7919 + 13);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t d = v.encoder->dim();
  for (std::size_t i = 0; i < n_b; ++i) v.base.push_back({int(i), oracle::random_unit(rng, d)});
  for (std::size_t i = 0; i < n_u; ++i) v.novel.push_back({int(100 + i), oracle::random_unit(rng, d)});
  v.shape = {baseline ? 0 : n_o, baseline ? 0 : n_a, baseline};
  for (std::size_t i = 0; i < v.shape.n_estimated + v.shape.n_expansion; ++i) {
    lbp::ContextVector c;
    c.category = int(i);
    for (std::size_t j = 0; j < v.encoder->context_dim(); ++j) c.values.push_back(g(rng));
    v.contexts.push_back(c);
  }
  v.sub_bg.values = oracle::random_unit(rng, d).values();
  v.train = lbp::build_training_vocab(v.base, v.contexts, v.sub_bg, *v.encoder, v.shape);
  v.infer = lbp::build_inference_vocab(v.train, v.novel);
  return v;
}

inline lbp::Proposal make_proposal(std::mt19937_64& rng, std::size_t d, std::optional<int> label = {},
                                   int id = 0) {
  lbp::Proposal p;
  p.id = id;
  p.detector_feature = oracle::random_unit(rng, d);
  p.clip_feature = oracle::random_unit(rng, d);
  p.rpn_score = 0.99;
  p.gt_label = label;
  return p;
}

inline lbp::ProposalBatch make_batch(std::mt19937_64& rng, std::size_t d, std::size_t n_b, std::size_t n_fg,
                                     std::size_t n_bg) {
  lbp::ProposalBatch b;
  for (std::size_t i = 0; i < n_fg; ++i) b.foreground.push_back(make_proposal(rng, d, int(i % n_b), int(i)));
  for (std::size_t i = 0; i < n_bg; ++i) b.background.push_back(make_proposal(rng, d, {}, int(n_fg + i)));
  return b;
}

/// A unit vector orthogonal to every vector in `others` (Gram-Schmidt).
inline lbp::Embedding orthogonal_to(const std::vector<lbp::Embedding>& others, std::mt19937_64& rng,
                                    std::size_t d) {
  std::vector<std::vector<double>> basis;
  for (const auto& o : others) {
    std::vector<double> u = o.values();
    for (const auto& b : basis) {
      const double k = double(oracle::dot(u, b));
      for (std::size_t i = 0; i < d; ++i) u[i] -= k * b[i];
    }
    const double n = std::sqrt(double(oracle::dot(u, u)));
    if (n < 1e-9) continue;
    for (double& x : u) x /= n;
    basis.push_back(u);
  }
  std::vector<double> r = oracle::random_unit(rng, d).values();
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double k = double(oracle::dot(r, b));
      for (std::size_t i = 0; i < d; ++i) r[i] -= k * b[i];
    }
  }
  return lbp::Embedding::normalized(r);
}

/// Background mass of a feature under a vocabulary, from the library head.
inline double mass_of(const lbp::Embedding& w, const lbp::Vocabulary& vocab, double tau) {
  return lbp::background_mass(lbp::softmax_probs(w, vocab.embeddings(), lbp::Temperature(tau)), vocab);
}

/// Bisects along the arc from the first base embedding to the sub-background
/// embedding for a feature whose background mass sits just at or above
/// (`above`) or just below `target`.
inline lbp::Embedding feature_with_mass(const lbp::Vocabulary& vocab, double tau, double target, bool above) {
  const lbp::Embedding& a = vocab.embedding(0);
  const lbp::Embedding& b = vocab.embedding(vocab.sub_background_index());
  auto at = [&](double t) {
    std::vector<double> v(a.dim());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1 - t) * a[i] + t * b[i];
    return lbp::Embedding::normalized(v);
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (mass_of(at(mid), vocab, tau) >= target ? hi : lo) = mid;
  }
  return at(above ? hi : lo);
}

}  // namespace fixture
