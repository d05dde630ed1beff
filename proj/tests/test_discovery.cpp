// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "lbp/discovery.hpp"
#include "lbp/error.hpp"
#include "lbp/synth.hpp"
#include "oracles.hpp"

using namespace lbp;

namespace {

std::vector<Box> random_boxes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> pos(0.0, 100.0), size(5.0, 40.0);
  std::vector<Box> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pos(rng), y = pos(rng);
    out.push_back({x, y, x + size(rng), y + size(rng)});
  }
  return out;
}

Proposal at(Box b, double rpn, int image = 0, int id = 0) {
  Proposal p;
  p.id = id;
  p.image = image;
  p.box = b;
  p.rpn_score = rpn;
  return p;
}

double purity(const std::vector<std::size_t>& assign, const std::vector<std::size_t>& truth, std::size_t k) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
  for (std::size_t i = 0; i < assign.size(); ++i) joint[{assign[i], truth[i]}] += 1;
  std::size_t hit = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t best = 0;
    for (const auto& [key, n] : joint) {
      if (key.first == c) best = std::max(best, n);
    }
    hit += best;
  }
  return double(hit) / double(assign.size());
}

}  // namespace

TEST_CASE("iou examples") {
  const Box a{0, 0, 2, 2}, b{1, 0, 3, 2}, c{5, 5, 6, 6};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, c) == 0.0);
  CHECK(iou(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(iou(a, b) == iou(b, a));
  std::mt19937_64 rng(1);
  const auto boxes = random_boxes(rng, 60);
  for (std::size_t i = 0; i + 1 < boxes.size(); ++i) {
    const double v = iou(boxes[i], boxes[i + 1]);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(std::abs(v - double(oracle::iou(boxes[i], boxes[i + 1]))) < 1e-14);
  }
}

TEST_CASE("nms examples") {
  const std::vector<Box> twin{{0, 0, 10, 10}, {0, 0, 10, 10}};
  CHECK(nms(twin, std::vector<double>{0.8, 0.9}, 0.5) == std::vector<std::size_t>{1});
  CHECK(nms(twin, std::vector<double>{0.9, 0.9}, 0.5) == std::vector<std::size_t>{0});
  const std::vector<Box> apart{{0, 0, 1, 1}, {2, 2, 3, 3}, {4, 4, 5, 5}};
  CHECK(nms(apart, std::vector<double>{0.1, 0.3, 0.2}, 0.5).size() == 3);
  CHECK_THROWS_AS(nms(apart, std::vector<double>{0.1}, 0.5), lbp::Error);
  CHECK_THROWS_AS(nms(apart, std::vector<double>{0.1, 0.2, 0.3}, 0.0), lbp::Error);
}

TEST_CASE("nms equals the exhaustive oracle on 200 sets") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 30;
    const auto boxes = random_boxes(rng, n);
    std::vector<double> scores(n);
    for (double& s : scores) s = std::round(u(rng) * 10) / 10;  // forces ties
    const double thr = t % 3 == 0 ? 0.3 : 0.5;
    auto kept = nms(boxes, scores, thr);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) CHECK(iou(boxes[kept[i]], boxes[kept[j]]) < thr);
    }
    std::sort(kept.begin(), kept.end());
    CHECK(kept == oracle::nms(boxes, scores, thr));
  }
}

TEST_CASE("proposal nms runs per image") {
  std::vector<Proposal> ps{at({0, 0, 10, 10}, 0.9, 0, 0), at({0, 0, 10, 10}, 0.8, 0, 1),
                           at({0, 0, 10, 10}, 0.7, 1, 2)};
  const auto kept = nms(ps, 0.5, ScoreKey::kRpn);
  std::set<int> ids;
  for (const auto& p : kept) ids.insert(p.id);
  CHECK(ids == std::set<int>{0, 2});
  const std::vector<double> pseudo{0.1, 0.95, 0.3};
  const auto by_pseudo = nms(ps, 0.5, ScoreKey::kPseudo, pseudo);
  ids.clear();
  for (const auto& p : by_pseudo) ids.insert(p.id);
  CHECK(ids == std::set<int>{1, 2});
  CHECK_THROWS_AS(nms(ps, 0.5, ScoreKey::kPseudo), lbp::Error);
}

TEST_CASE("background filter") {
  BackgroundFilter f;
  CHECK(f.theta == 0.95);
  const std::vector<GroundTruthBox> gt{{0, {0, 0, 10, 10}, 1}};
  std::vector<Proposal> ps{at({0, 0, 10, 12}, 0.99, 0, 0),    // IoU 0.83 with GT
                           at({0, 0, 10, 16}, 0.99, 0, 1),    // IoU 0.625
                           at({50, 50, 60, 60}, 0.90, 0, 2),  // low RPN score
                           at({50, 50, 60, 60}, 0.97, 0, 3), at({51, 50, 61, 60}, 0.96, 0, 4),
                           at({0, 0, 10, 10}, 0.99, 1, 5)};   // GT lives on image 0 only
  const auto kept = filter_background_proposals(ps, gt, f);
  std::set<int> ids;
  for (const auto& p : kept) {
    ids.insert(p.id);
    CHECK(p.rpn_score >= f.theta);
  }
  CHECK(ids == std::set<int>{3, 5});
  CHECK(filter_background_proposals({}, gt, f).empty());
  std::vector<Proposal> one{at({0, 0, 10, 16.666}, 0.99)};
  CHECK(filter_background_proposals(one, gt, f).empty());
}

TEST_CASE("kmeans examples") {
  std::vector<Embedding> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(Embedding(std::vector<double>{1, 0, 0}));
  for (int i = 0; i < 7; ++i) pts.push_back(Embedding(std::vector<double>{0, 1, 0}));
  const ClusterModel m = kmeans(pts, 2, 3);
  CHECK(m.objective == doctest::Approx(0.0));
  CHECK(m.assignments[0] != m.assignments[10]);
  for (std::size_t i = 0; i < 10; ++i) CHECK(m.assignments[i] == m.assignments[0]);

  std::mt19937_64 rng(4);
  std::vector<Embedding> rnd;
  std::vector<double> sum(5, 0.0);
  for (int i = 0; i < 40; ++i) {
    rnd.push_back(oracle::random_unit(rng, 5));
    for (std::size_t j = 0; j < 5; ++j) sum[j] += rnd.back()[j];
  }
  const ClusterModel one = kmeans(rnd, 1, 1);
  const Embedding mean = Embedding::normalized(sum);
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(one.centers[0][j] - mean[j]) < 1e-12);

  CHECK_THROWS_AS(kmeans(rnd, 0, 1), lbp::Error);
  CHECK_THROWS_AS(kmeans(rnd, 41, 1), lbp::Error);
}

TEST_CASE("kmeans objective never increases and assignments are nearest") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const BlobSet b = generate_blobs(4, 50, 8, 1.5 + double(seed % 4), seed);
    for (std::size_t k : {2, 4, 7}) {
      const ClusterModel m = kmeans(b.points, k, seed);
      for (std::size_t i = 1; i < m.objective_history.size(); ++i) {
        CHECK(m.objective_history[i] <= m.objective_history[i - 1] + 1e-12);
      }
      long double obj = 0;
      for (std::size_t i = 0; i < b.points.size(); ++i) {
        long double best = INFINITY;
        std::size_t arg = 0;
        for (std::size_t c = 0; c < k; ++c) {
          long double d = 0;
          for (std::size_t j = 0; j < 8; ++j) {
            const long double x = b.points[i][j] - m.centers[c][j];
            d += x * x;
          }
          if (d < best) {
            best = d;
            arg = c;
          }
        }
        CHECK(m.assignments[i] == arg);
        obj += best;
      }
      CHECK(std::abs(double(obj) - m.objective) < 1e-9);
    }
  }
}

TEST_CASE("kmeans recovers three separated blobs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const BlobSet b = generate_blobs(3, 200, 16, 8.0, seed);
    const ClusterModel m = kmeans(b.points, 3, seed);
    CHECK(purity(m.assignments, b.labels, 3) == 1.0);
  }
}

TEST_CASE("silhouette matches the brute-force oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const BlobSet b = generate_blobs(3, 20, 6, 3.0, seed);
    for (std::size_t k : {2, 3, 5}) {
      const ClusterModel m = kmeans(b.points, k, seed);
      std::vector<oracle::Vec> pts;
      for (const auto& p : b.points) pts.push_back(p.values());
      CHECK(std::abs(silhouette_score(b.points, m.assignments, k) -
                     double(oracle::silhouette(pts, m.assignments, k))) < 1e-12);
    }
  }
}

TEST_CASE("count estimation on five blobs") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const BlobSet b = generate_blobs(5, 200, 16, 8.0, seed);
    const CountEstimate e = estimate_category_count(b.points, 2, 10, seed);
    hits += e.k == 5;
    CHECK(e.candidates.size() == 9);
    CHECK(e.silhouettes.size() == 9);
  }
  CHECK(hits >= 19);
}

TEST_CASE("a single blob falls back to k_min with low confidence") {
  const BlobSet b = generate_blobs(1, 200, 16, 8.0, 3);
  const CountEstimate e = estimate_category_count(b.points, 2, 6, 3);
  CHECK(e.k == 2);
  CHECK(e.low_confidence);
}

TEST_CASE("count estimation is deterministic and validates its range") {
  const BlobSet b = generate_blobs(3, 30, 8, 6.0, 9);
  const CountEstimate a = estimate_category_count(b.points, 2, 6, 9);
  const CountEstimate c = estimate_category_count(b.points, 2, 6, 9);
  CHECK(a.k == c.k);
  CHECK(a.silhouettes == c.silhouettes);
  CHECK_THROWS_AS(estimate_category_count(b.points, 1, 6, 9), lbp::Error);
  CHECK_THROWS_AS(estimate_category_count(b.points, 5, 4, 9), lbp::Error);
  CHECK_THROWS_AS(estimate_category_count(b.points, 2, 91, 9), lbp::Error);
}
