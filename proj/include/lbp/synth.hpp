// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lbp/discovery.hpp"
#include "lbp/encoder.hpp"
#include "lbp/proposal.hpp"

namespace lbp {

enum class CategoryRole { kBase, kNovel, kDistractor };

const char* to_string(CategoryRole role);
CategoryRole category_role_from_string(const std::string& s);

struct ScenarioConfig {
  EncoderConfig encoder;
  std::size_t n_base = 8;
  std::size_t n_novel = 4;
  std::size_t n_distractor = 3;
  std::size_t train_images = 60;
  std::size_t infer_images = 60;
  std::size_t objects_per_image = 4;
  std::size_t proposals_per_object = 4;
  std::size_t clutter_per_image = 12;
  double sigma_feat = 0.1;            // I(x) noise around the prototype
  double sigma_det = 0.15;            // w(x) noise around I(x)
  double max_prototype_cos = 0.8;     // rejection bound on pairwise prototype cosine
  double hidden_frequency_skew = 2.0; // Zipf exponent over novel-then-distractor categories
  double image_size = 256.0;
  double min_box = 32.0;
  double max_box = 96.0;
  double proposal_jitter = 0.08;      // per-coordinate jitter as a fraction of box size
  double rpn_object_mean = 0.97;
  double rpn_object_std = 0.02;
  double rpn_clutter_mean = 0.3;
  double rpn_clutter_std = 0.15;
  double match_iou = 0.5;             // proposal-to-annotation matching
  std::size_t prototype_budget = 20000;
  std::uint64_t seed = 1;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// A category the dataset makes visible by name (base always, novel only in
/// the inference split). The name seed is what the text encoder consumes.
struct CategoryInfo {
  int id = 0;
  CategoryRole role = CategoryRole::kBase;
  std::uint64_t name_seed = 0;

  friend bool operator==(const CategoryInfo&, const CategoryInfo&) = default;
};

struct PrototypeEntry {
  CategoryInfo category;
  Embedding embedding;

  friend bool operator==(const PrototypeEntry&, const PrototypeEntry&) = default;
};

/// Everything an algorithm must not see.
struct DatasetOracle {
  std::vector<PrototypeEntry> prototypes;  // every category, including hidden ones
  std::vector<GroundTruthBox> objects;     // every object, including unannotated ones

  friend bool operator==(const DatasetOracle&, const DatasetOracle&) = default;
};

struct Dataset {
  std::string split;                        // "train" or "infer"
  ScenarioConfig config;
  std::vector<CategoryInfo> categories;     // visible categories
  std::vector<GroundTruthBox> annotations;  // visible boxes
  std::vector<Proposal> proposals;
  std::size_t image_count = 0;
  DatasetOracle oracle;

  std::vector<CategoryInfo> categories_with_role(CategoryRole role) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct Scenario {
  ScenarioConfig config;
  std::vector<PrototypeEntry> prototypes;  // base, novel, distractor in id order
  Dataset train;                           // novel and distractor objects unannotated
  Dataset infer;                           // novel annotations revealed
};

Scenario generate_scenario(const ScenarioConfig& config);

struct ForegroundBackgroundSplit {
  std::vector<Proposal> foreground;  // P
  std::vector<Proposal> background;  // N
};

/// P = proposals matched to an annotated base box; N = everything else.
ForegroundBackgroundSplit split_fg_bg(const Dataset& dataset);

/// Blobs on the unit sphere for clustering checks: `n_blobs` random unit
/// centers, per-coordinate noise std = (min pairwise center distance) / ratio.
struct BlobSet {
  std::vector<Embedding> points;
  std::vector<std::size_t> labels;
  std::vector<Embedding> centers;
};

BlobSet generate_blobs(std::size_t n_blobs, std::size_t points_per_blob, std::size_t dim,
                       double separation_ratio, std::uint64_t seed);

}  // namespace lbp
