// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbp/core_math.hpp"
#include "lbp/encoder.hpp"

namespace lbp {

enum class CategoryKind { kBase, kNovel, kUnderlying, kSubBackground };

const char* to_string(CategoryKind kind);
CategoryKind category_kind_from_string(const std::string& s);

/// For Base/Novel the index is the category's dataset id; for Underlying it is
/// the position in the underlying block; SubBackground always uses 0.
struct CategoryId {
  int index = 0;
  CategoryKind kind = CategoryKind::kBase;

  friend bool operator==(const CategoryId&, const CategoryId&) = default;
};

/// Half-open index range into a vocabulary's ordered category list.
struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
};

/// A named (frozen) category as the vocabulary receives it.
struct NamedCategory {
  int id = 0;
  Embedding embedding;
};

/// Learnable directly in embedding space; the vocabulary sees normalize(values).
struct SubBackgroundEmbedding {
  std::vector<double> values;

  friend bool operator==(const SubBackgroundEmbedding&, const SubBackgroundEmbedding&) = default;
};

struct VocabularyShape {
  std::size_t n_estimated = 0;  // n_o, the clustered categories C_O'
  std::size_t n_expansion = 0;  // n_a, the safety expansion C_a
  bool baseline_mode = false;   // single background embedding t_bg, no underlying block
};

/// Immutable snapshot of the ordered category list
///   [base..., novel..., underlying..., sub_background]
/// so that every probability vector is index-aligned with it.
class Vocabulary {
 public:
  std::size_t size() const noexcept { return embeddings_.size(); }
  std::size_t dim() const noexcept { return embeddings_.empty() ? 0 : embeddings_.front().dim(); }

  std::span<const Embedding> embeddings() const noexcept { return embeddings_; }
  const Embedding& embedding(std::size_t i) const { return embeddings_.at(i); }
  std::span<const CategoryId> ids() const noexcept { return ids_; }
  const CategoryId& id(std::size_t i) const { return ids_.at(i); }

  Block base_block() const noexcept { return base_; }
  Block novel_block() const noexcept { return novel_; }
  Block underlying_block() const noexcept { return underlying_; }
  /// C_O': the first n_o underlying categories, the ones pseudo labels point at.
  Block estimated_block() const noexcept { return {underlying_.begin, underlying_.begin + n_estimated_}; }
  /// C_a: the n_a expansion categories.
  Block expansion_block() const noexcept { return {underlying_.begin + n_estimated_, underlying_.end}; }
  std::size_t sub_background_index() const noexcept { return embeddings_.size() - 1; }
  /// C_O plus the sub-background class; this is contiguous by construction.
  Block background_block() const noexcept { return {underlying_.begin, embeddings_.size()}; }

  std::size_t n_estimated() const noexcept { return n_estimated_; }
  std::size_t n_expansion() const noexcept { return underlying_.size() - n_estimated_; }
  bool baseline_mode() const noexcept { return baseline_mode_; }
  bool is_inference() const noexcept { return inference_; }

  std::span<const ContextVector> context_vectors() const noexcept { return contexts_; }
  const SubBackgroundEmbedding& sub_background() const noexcept { return sub_background_; }

  std::optional<std::size_t> index_of(const CategoryId& id) const;
  /// Index of a base or novel category by its dataset id.
  std::optional<std::size_t> index_of_named(int dataset_id) const;

  friend Vocabulary build_training_vocab(std::span<const NamedCategory> base,
                                         std::span<const ContextVector> contexts,
                                         const SubBackgroundEmbedding& sub_bg,
                                         const MockTextEncoder& encoder,
                                         const VocabularyShape& shape);
  friend Vocabulary build_inference_vocab(const Vocabulary& training,
                                          std::span<const NamedCategory> novel);

 private:
  std::vector<CategoryId> ids_;
  std::vector<Embedding> embeddings_;
  std::vector<ContextVector> contexts_;
  SubBackgroundEmbedding sub_background_;
  Block base_, novel_, underlying_;
  std::size_t n_estimated_ = 0;
  bool baseline_mode_ = false;
  bool inference_ = false;
};

Vocabulary build_training_vocab(std::span<const NamedCategory> base,
                                std::span<const ContextVector> contexts,
                                const SubBackgroundEmbedding& sub_bg, const MockTextEncoder& encoder,
                                const VocabularyShape& shape);

Vocabulary build_inference_vocab(const Vocabulary& training, std::span<const NamedCategory> novel);

}  // namespace lbp
