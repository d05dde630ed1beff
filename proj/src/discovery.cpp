// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/discovery.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "lbp/rng.hpp"

namespace lbp {

bool Box::valid() const noexcept {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x1 < x2 && y1 < y2;
}

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

std::vector<std::size_t> nms(std::span<const Box> boxes, std::span<const double> scores,
                             double iou_threshold) {
  require(boxes.size() == scores.size(), ErrorCode::kDimensionMismatch, "nms: boxes/scores mismatch");
  require(iou_threshold > 0.0 && iou_threshold <= 1.0, ErrorCode::kOutOfRange,
          "nms: threshold must lie in (0, 1]");
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    bool keep = true;
    for (std::size_t j : kept) {
      if (iou(boxes[i], boxes[j]) >= iou_threshold) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(i);
  }
  return kept;
}

std::vector<Proposal> nms(std::span<const Proposal> proposals, double iou_threshold, ScoreKey key,
                          std::span<const double> pseudo_scores) {
  if (key == ScoreKey::kPseudo) {
    require(pseudo_scores.size() == proposals.size(), ErrorCode::kDimensionMismatch,
            "nms: pseudo scores do not align with proposals");
  }
  std::map<int, std::vector<std::size_t>> by_image;
  for (std::size_t i = 0; i < proposals.size(); ++i) by_image[proposals[i].image].push_back(i);

  std::vector<char> keep(proposals.size(), 0);
  for (const auto& [image, members] : by_image) {
    std::vector<Box> boxes;
    std::vector<double> scores;
    for (std::size_t i : members) {
      boxes.push_back(proposals[i].box);
      scores.push_back(key == ScoreKey::kRpn ? proposals[i].rpn_score : pseudo_scores[i]);
    }
    for (std::size_t k : nms(boxes, scores, iou_threshold)) keep[members[k]] = 1;
  }
  std::vector<Proposal> out;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    if (keep[i]) out.push_back(proposals[i]);
  }
  return out;
}

std::vector<Proposal> filter_background_proposals(std::span<const Proposal> background,
                                                  std::span<const GroundTruthBox> ground_truth,
                                                  const BackgroundFilter& filter) {
  std::multimap<int, const GroundTruthBox*> gt_by_image;
  for (const GroundTruthBox& g : ground_truth) gt_by_image.emplace(g.image, &g);

  std::vector<Proposal> gated;
  for (const Proposal& p : background) {
    if (p.rpn_score < filter.theta) continue;
    double max_iou = 0.0;
    auto [lo, hi] = gt_by_image.equal_range(p.image);
    for (auto it = lo; it != hi; ++it) max_iou = std::max(max_iou, iou(p.box, it->second->box));
    if (max_iou >= filter.gt_iou_cut) continue;
    gated.push_back(p);
  }
  return nms(gated, filter.nms_iou, ScoreKey::kRpn);
}

namespace {

double squared_distance(const Embedding& a, const Embedding& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

std::vector<Embedding> kmeans_plus_plus(std::span<const Embedding> points, std::size_t k, Rng& rng) {
  std::vector<Embedding> centers;
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  centers.push_back(points[pick(rng)]);
  std::vector<double> d2(points.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
      total += d2[i];
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      chosen = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        r -= d2[i];
        if (r < 0.0 && d2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centers.push_back(points[chosen]);
  }
  return centers;
}

}  // namespace

namespace {

ClusterModel lloyd(std::span<const Embedding> points, std::size_t k, Rng& rng, std::size_t max_iters) {
  const std::size_t n = points.size();
  const std::size_t d = points.front().dim();
  ClusterModel m;
  m.centers = kmeans_plus_plus(points, k, rng);
  m.assignments.assign(n, 0);
  std::vector<std::size_t> previous;

  for (std::size_t it = 0; it < std::max<std::size_t>(max_iters, 1); ++it) {
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(points[i], m.centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double dc = squared_distance(points[i], m.centers[c]);
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      m.assignments[i] = best;
      dist[i] = best_d;
    }

    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : m.assignments) ++counts[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[m.assignments[i]] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) break;
      --counts[m.assignments[far]];
      m.assignments[far] = c;
      counts[c] = 1;
      dist[far] = 0.0;
    }

    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[m.assignments[i]];
      for (std::size_t j = 0; j < d; ++j) s[j] += points[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      if (norm2(sums[c]) > 1e-12) m.centers[c] = Embedding::normalized(sums[c]);
    }

    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) obj += squared_distance(points[i], m.centers[m.assignments[i]]);
    m.objective = obj;
    m.objective_history.push_back(obj);
    m.iterations = it + 1;
    if (m.assignments == previous) break;
    previous = m.assignments;
  }
  return m;
}

}  // namespace

ClusterModel kmeans(std::span<const Embedding> points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters, std::size_t restarts) {
  require(k >= 1, ErrorCode::kInvalidArgument, "kmeans: k must be >= 1");
  require(k <= points.size(), ErrorCode::kInvalidArgument, "kmeans: k exceeds the number of points");
  require(restarts >= 1, ErrorCode::kInvalidArgument, "kmeans: restarts must be >= 1");
  const std::size_t d = points.front().dim();
  for (const Embedding& p : points) {
    require(p.dim() == d, ErrorCode::kDimensionMismatch, "kmeans: mixed point dimensions");
  }
  Rng rng = make_rng({seed, stream::kKmeans, k});
  ClusterModel best = lloyd(points, k, rng, max_iters);
  for (std::size_t r = 1; r < restarts; ++r) {
    ClusterModel m = lloyd(points, k, rng, max_iters);
    if (m.objective < best.objective) best = std::move(m);
  }
  return best;
}

namespace {

double silhouette_from_matrix(const std::vector<double>& dist, std::size_t n,
                              std::span<const std::size_t> assignments, std::size_t k) {
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t a : assignments) ++counts[a];
  double total = 0.0;
  std::vector<double> per_cluster(k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = assignments[i];
    if (counts[own] <= 1) continue;
    std::fill(per_cluster.begin(), per_cluster.end(), 0.0);
    const double* row = &dist[i * n];
    for (std::size_t j = 0; j < n; ++j) per_cluster[assignments[j]] += row[j];
    const double a = per_cluster[own] / double(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, per_cluster[c] / double(counts[c]));
    }
    if (!std::isfinite(b)) continue;
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / double(n);
}

std::vector<double> distance_matrix(std::span<const Embedding> points) {
  const std::size_t n = points.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = std::sqrt(squared_distance(points[i], points[j]));
      dist[i * n + j] = dij;
      dist[j * n + i] = dij;
    }
  }
  return dist;
}

}  // namespace

double silhouette_score(std::span<const Embedding> points, std::span<const std::size_t> assignments,
                        std::size_t k) {
  require(points.size() == assignments.size(), ErrorCode::kDimensionMismatch,
          "silhouette: assignments do not match points");
  if (points.empty()) return 0.0;
  return silhouette_from_matrix(distance_matrix(points), points.size(), assignments, k);
}

CountEstimate estimate_category_count(std::span<const Embedding> features, std::size_t k_min,
                                      std::size_t k_max, std::uint64_t seed) {
  require(k_min >= 2, ErrorCode::kInvalidArgument, "estimate_category_count: k_min must be >= 2");
  require(k_min <= k_max, ErrorCode::kInvalidArgument, "estimate_category_count: empty k range");
  require(k_max <= features.size(), ErrorCode::kInvalidArgument,
          "estimate_category_count: k_max exceeds the number of points");
  const std::vector<double> dist = distance_matrix(features);
  CountEstimate est;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const ClusterModel m = kmeans(features, k, seed);
    const double s = silhouette_from_matrix(dist, features.size(), m.assignments, k);
    est.candidates.push_back(k);
    est.silhouettes.push_back(s);
    if (s > best) {
      best = s;
      est.k = k;
    }
  }
  if (best < kSilhouetteConfidenceFloor) {
    est.k = k_min;
    est.low_confidence = true;
  }
  return est;
}

}  // namespace lbp
