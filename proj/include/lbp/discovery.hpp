// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lbp/core_math.hpp"
#include "lbp/proposal.hpp"

namespace lbp {

double iou(const Box& a, const Box& b);

/// Greedy suppression in descending score order; equal scores keep the lower
/// input index first. Returns kept indices in suppression order.
std::vector<std::size_t> nms(std::span<const Box> boxes, std::span<const double> scores,
                             double iou_threshold);

enum class ScoreKey { kRpn, kPseudo };

/// NMS over proposals, separately per image. `pseudo_scores` is required for
/// ScoreKey::kPseudo and must align with `proposals`.
std::vector<Proposal> nms(std::span<const Proposal> proposals, double iou_threshold, ScoreKey key,
                          std::span<const double> pseudo_scores = {});

struct GroundTruthBox {
  int image = 0;
  Box box;
  int label = 0;
  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

struct BackgroundFilter {
  double theta = 0.95;        // minimum RPN score
  double gt_iou_cut = 0.5;    // drop proposals with max IoU to any GT box >= this
  double nms_iou = 0.5;

  friend bool operator==(const BackgroundFilter&, const BackgroundFilter&) = default;
};

/// RPN-score gate, ground-truth overlap gate, then per-image NMS.
std::vector<Proposal> filter_background_proposals(std::span<const Proposal> background,
                                                  std::span<const GroundTruthBox> ground_truth,
                                                  const BackgroundFilter& filter);

struct ClusterModel {
  std::vector<Embedding> centers;      // normalized member means
  std::vector<std::size_t> assignments;
  double objective = 0.0;              // sum of squared distances to centers
  std::vector<double> objective_history;  // after each Lloyd iteration
  std::size_t iterations = 0;
};

/// Spherical k-means: k-means++ seeding, Lloyd iterations on squared
/// Euclidean distance with unit-norm centers, empty clusters re-seeded to the
/// point farthest from its center. The lowest-objective run out of
/// `restarts` independent seedings is returned.
ClusterModel kmeans(std::span<const Embedding> points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 100, std::size_t restarts = 10);

/// Mean silhouette over all points (Euclidean distance). Singleton clusters
/// contribute 0.
double silhouette_score(std::span<const Embedding> points, std::span<const std::size_t> assignments,
                        std::size_t k);

struct CountEstimate {
  std::size_t k = 0;
  std::vector<std::size_t> candidates;
  std::vector<double> silhouettes;  // aligned with candidates
  bool low_confidence = false;
};

/// Below this mean silhouette no clustering structure is claimed.
inline constexpr double kSilhouetteConfidenceFloor = 0.25;

/// Silhouette-maximizing k over [k_min, k_max]; ties go to the smaller k. If
/// the best silhouette is under kSilhouetteConfidenceFloor the estimate
/// falls back to k_min and is flagged low-confidence.
CountEstimate estimate_category_count(std::span<const Embedding> features, std::size_t k_min,
                                      std::size_t k_max, std::uint64_t seed);

}  // namespace lbp
