// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/vocabulary.hpp"

#include <set>

namespace lbp {

const char* to_string(CategoryKind kind) {
  switch (kind) {
    case CategoryKind::kBase: return "base";
    case CategoryKind::kNovel: return "novel";
    case CategoryKind::kUnderlying: return "underlying";
    case CategoryKind::kSubBackground: return "sub_background";
  }
  return "?";
}

CategoryKind category_kind_from_string(const std::string& s) {
  if (s == "base") return CategoryKind::kBase;
  if (s == "novel") return CategoryKind::kNovel;
  if (s == "underlying") return CategoryKind::kUnderlying;
  if (s == "sub_background") return CategoryKind::kSubBackground;
  fail(ErrorCode::kFormat, "unknown category kind '" + s + "'");
}

std::optional<std::size_t> Vocabulary::index_of(const CategoryId& id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Vocabulary::index_of_named(int dataset_id) const {
  for (std::size_t i = base_.begin; i < novel_.end; ++i) {
    if (ids_[i].index == dataset_id) return i;
  }
  return std::nullopt;
}

Vocabulary build_training_vocab(std::span<const NamedCategory> base,
                                std::span<const ContextVector> contexts,
                                const SubBackgroundEmbedding& sub_bg, const MockTextEncoder& encoder,
                                const VocabularyShape& shape) {
  const std::size_t d = encoder.dim();
  if (shape.baseline_mode) {
    require(contexts.empty() && shape.n_estimated == 0 && shape.n_expansion == 0,
            ErrorCode::kInvalidArgument, "baseline mode takes no underlying categories");
  } else {
    require(contexts.size() == shape.n_estimated + shape.n_expansion, ErrorCode::kInvalidArgument,
            "context vector count must equal n_o + n_a");
  }
  require(sub_bg.values.size() == d, ErrorCode::kDimensionMismatch,
          "sub-background embedding dimension mismatch");

  Vocabulary v;
  std::set<int> seen;
  for (const NamedCategory& c : base) {
    require(c.embedding.dim() == d, ErrorCode::kDimensionMismatch, "base embedding dimension mismatch");
    require(seen.insert(c.id).second, ErrorCode::kInvalidArgument, "duplicate base category id");
    v.ids_.push_back({c.id, CategoryKind::kBase});
    v.embeddings_.push_back(c.embedding);
  }
  v.base_ = {0, v.embeddings_.size()};
  v.novel_ = {v.base_.end, v.base_.end};
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    v.ids_.push_back({static_cast<int>(i), CategoryKind::kUnderlying});
    v.embeddings_.push_back(encoder.encode_context(contexts[i]));
  }
  v.underlying_ = {v.novel_.end, v.embeddings_.size()};
  v.ids_.push_back({0, CategoryKind::kSubBackground});
  v.embeddings_.push_back(Embedding::normalized(sub_bg.values));

  v.contexts_.assign(contexts.begin(), contexts.end());
  v.sub_background_ = sub_bg;
  v.n_estimated_ = shape.n_estimated;
  v.baseline_mode_ = shape.baseline_mode;
  return v;
}

Vocabulary build_inference_vocab(const Vocabulary& training, std::span<const NamedCategory> novel) {
  std::set<int> base_ids;
  for (std::size_t i = training.base_.begin; i < training.base_.end; ++i) {
    base_ids.insert(training.ids_[i].index);
  }
  std::set<int> novel_ids;
  for (const NamedCategory& c : novel) {
    require(!base_ids.count(c.id), ErrorCode::kInvalidArgument, "novel category id collides with a base id");
    require(novel_ids.insert(c.id).second, ErrorCode::kInvalidArgument, "duplicate novel category id");
    require(c.embedding.dim() == training.dim(), ErrorCode::kDimensionMismatch,
            "novel embedding dimension mismatch");
  }

  Vocabulary v = training;
  v.ids_.clear();
  v.embeddings_.clear();
  auto copy_block = [&](Block b) {
    for (std::size_t i = b.begin; i < b.end; ++i) {
      v.ids_.push_back(training.ids_[i]);
      v.embeddings_.push_back(training.embeddings_[i]);
    }
  };
  copy_block(training.base_);
  for (const NamedCategory& c : novel) {
    v.ids_.push_back({c.id, CategoryKind::kNovel});
    v.embeddings_.push_back(c.embedding);
  }
  v.novel_ = {training.base_.end, v.embeddings_.size()};
  copy_block(training.underlying_);
  v.underlying_ = {v.novel_.end, v.novel_.end + training.underlying_.size()};
  v.ids_.push_back(training.ids_.back());
  v.embeddings_.push_back(training.embeddings_.back());
  v.inference_ = true;
  return v;
}

}  // namespace lbp
