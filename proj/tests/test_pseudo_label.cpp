// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "lbp/error.hpp"
#include "lbp/pseudo_label.hpp"
#include "lbp/synth.hpp"
#include "lbp/trainer.hpp"

using namespace lbp;

namespace {

std::vector<Embedding> orthonormal(std::size_t k, std::size_t d) {
  std::vector<Embedding> out;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> v(d, 0.0);
    v[i] = 1.0;
    out.emplace_back(v);
  }
  return out;
}

Proposal bg_at(Box b, const Embedding& clip, int image = 0) {
  Proposal p;
  p.image = image;
  p.box = b;
  p.rpn_score = 0.99;
  p.clip_feature = clip;
  p.detector_feature = clip;
  return p;
}

std::size_t nearest(const Embedding& x, std::span<const Embedding> cs) {
  std::size_t best = 0;
  oracle::LD best_c = -2;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const oracle::LD c = oracle::cosine(x.values(), cs[i].values());
    if (c > best_c) {
      best_c = c;
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("center_probs examples") {
  const auto cs = orthonormal(4, 6);
  const auto p = center_probs(cs[0], cs, Temperature(0.02));
  const long double ref = 1.0L / (1.0L + 3.0L * std::exp(-50.0L));
  CHECK(p[0] >= double(1.0L - 1e-18L));
  CHECK(std::abs(p[0] - double(ref)) < 1e-18);

  std::vector<Embedding> two{cs[0], cs[1]};
  const auto half = center_probs(cs[2], two, Temperature(0.02));
  CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));

  std::vector<Embedding> single{cs[1]};
  CHECK(center_probs(cs[3], single, Temperature(0.02)) == std::vector<double>{1.0});
  CHECK_THROWS_AS(center_probs(cs[0], std::vector<Embedding>{}, Temperature(1.0)), lbp::Error);
}

TEST_CASE("pseudo label argmax") {
  const auto cs = orthonormal(4, 6);
  CHECK(assign_pseudo_label(cs[2], cs, Temperature(0.02)).cls == 2);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 1000; ++t) {
    std::vector<Embedding> centers;
    for (int c = 0; c < 5; ++c) centers.push_back(oracle::random_unit(rng, 8));
    const Embedding x = oracle::random_unit(rng, 8);
    const PseudoLabel a = assign_pseudo_label(x, centers, Temperature(1.0));
    const PseudoLabel b = assign_pseudo_label(x, centers, Temperature(0.02));
    CHECK(a.cls == b.cls);
    CHECK(a.cls == nearest(x, centers));
    const auto p = center_probs(x, centers, Temperature(1.0));
    CHECK(a.score == *std::max_element(p.begin(), p.end()));
  }
}

TEST_CASE("low scores leave every filtered proposal negative") {
  const auto cs = orthonormal(3, 6);
  std::vector<Proposal> ps;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 6; ++i) ps.push_back(bg_at({double(40 * i), 0, double(40 * i + 30), 30}, oracle::random_unit(rng, 6)));
  PseudoLabelConfig cfg;
  const auto part = generate_pseudo_labels(ps, {}, cs, Temperature(1.0), cfg);
  CHECK(part.positives.empty());
  CHECK(part.negatives.size() == 6);
  CHECK(cfg.theta == 0.95);
  CHECK(kDefaultTheta == 0.95);
  CHECK(kDefaultLambdaBg == 0.05);
}

TEST_CASE("per-class nms keeps the higher pseudo score") {
  const auto cs = orthonormal(3, 6);
  const Temperature tau(0.1);
  // Tilt center 0 toward center 1 until the pseudo score drops to `target`.
  auto with_score = [&](double target) {
    double lo = 0.0, hi = 1.0;
    auto at = [](double t) { return Embedding::normalized(std::vector<double>{1.0, t, 0, 0, 0, 0}); };
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (assign_pseudo_label(at(mid), cs, tau).score > target ? lo : hi) = mid;
    }
    return at(lo);
  };
  const Embedding a = with_score(0.99);
  const Embedding b = with_score(0.98);
  CHECK(assign_pseudo_label(a, cs, tau).score == doctest::Approx(0.99).epsilon(1e-9));
  CHECK(assign_pseudo_label(b, cs, tau).score == doctest::Approx(0.98).epsilon(1e-9));
  std::vector<Proposal> ps{bg_at({0, 0, 100, 100}, b), bg_at({0, 0, 100, 95}, a)};
  REQUIRE(iou(ps[0].box, ps[1].box) >= 0.9);
  PseudoLabelConfig cfg;
  cfg.filter.nms_iou = 1.0;  // isolate the per-class stage
  const auto part = generate_pseudo_labels(ps, {}, cs, tau, cfg);
  REQUIRE(part.positives.size() == 1);
  CHECK(part.positives[0].proposal.clip_feature == a);
  CHECK(part.negatives.size() == 1);

  // Different classes never suppress each other.
  std::vector<Proposal> mixed{bg_at({0, 0, 100, 100}, cs[0]), bg_at({0, 0, 100, 95}, cs[1])};
  CHECK(generate_pseudo_labels(mixed, {}, cs, Temperature(0.02), cfg).positives.size() == 2);
}

TEST_CASE("partition covers the filtered set exactly") {
  ScenarioConfig sc;
  const Scenario s = generate_scenario(sc);
  const auto split = split_fg_bg(s.train);
  TrainConfig tc;
  const DiscoveryResult disc = discover_background_categories(s.train, tc);
  PseudoLabelConfig cfg;
  cfg.filter = tc.filter;
  const auto filtered = filter_background_proposals(split.background, s.train.annotations, cfg.filter);
  const auto part = generate_pseudo_labels(split.background, s.train.annotations, disc.centers,
                                           Temperature(tc.tau), cfg);
  CHECK(part.positives.size() + part.negatives.size() == filtered.size());
  std::multiset<int> ids, expect;
  for (const auto& p : part.positives) {
    ids.insert(p.proposal.id);
    CHECK(p.label.cls < disc.centers.size());
    CHECK(p.label.score >= cfg.theta);
  }
  for (const auto& p : part.negatives) ids.insert(p.id);
  for (const auto& p : filtered) expect.insert(p.id);
  CHECK(ids == expect);

  // Labels depend on I(x) only.
  auto scrambled = split.background;
  std::mt19937_64 rng(3);
  for (auto& p : scrambled) p.detector_feature = oracle::random_unit(rng, p.detector_feature.dim());
  const auto again = generate_pseudo_labels(scrambled, s.train.annotations, disc.centers, Temperature(tc.tau), cfg);
  REQUIRE(again.positives.size() == part.positives.size());
  for (std::size_t i = 0; i < again.positives.size(); ++i) {
    CHECK(again.positives[i].proposal.id == part.positives[i].proposal.id);
    CHECK(again.positives[i].label.cls == part.positives[i].label.cls);
  }
}

TEST_CASE("box refiner is applied to positives only") {
  const auto cs = orthonormal(2, 6);
  std::vector<Proposal> ps{bg_at({0, 0, 10, 10}, cs[0]), bg_at({50, 50, 60, 60}, Embedding::normalized(std::vector<double>{1, 1, 0, 0, 0, 0}))};
  PseudoLabelConfig cfg;
  const auto part = generate_pseudo_labels(ps, {}, cs, Temperature(0.02), cfg,
                                           [](const Proposal&, const PseudoLabel&) { return Box{1, 2, 3, 4}; });
  REQUIRE(part.positives.size() == 1);
  CHECK(part.positives[0].proposal.box == Box{1, 2, 3, 4});
  CHECK(part.negatives[0].box == Box{50, 50, 60, 60});
}

TEST_CASE("bod loss matches the two-term oracle") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto v = fixture::make_vocabs(seed, 3, 3, 2, 0);
    std::mt19937_64 rng(seed + 50);
    BackgroundPartition part;
    for (int i = 0; i < 4; ++i) {
      PositiveBackground pb{fixture::make_proposal(rng, 12), PseudoLabel{}};
      pb.label.cls = std::size_t(i) % 3;
      part.positives.push_back(pb);
    }
    for (int i = 0; i < 5; ++i) part.negatives.push_back(fixture::make_proposal(rng, 12));
    for (double tau : {1.0, 0.05}) {
      const auto rows = oracle::rows_of(v.train);
      // Underlying block starts after the 3 base categories: C_O' = 3..5, C_a = 6..7, sub_bg = 8.
      REQUIRE(v.train.size() == 9);
      oracle::LD pos = 0, neg = 0;
      for (const auto& pb : part.positives) {
        const auto p = oracle::softmax(pb.proposal.detector_feature.values(), rows, tau);
        pos += -std::log(p[3 + pb.label.cls]);
      }
      for (const auto& n : part.negatives) {
        const auto p = oracle::softmax(n.detector_feature.values(), rows, tau);
        neg += -std::log(p[6] + p[7] + p[8]);
      }
      const oracle::LD ref = pos / 4 + 0.05L * neg / 5;
      const double got = loss_bod(part, v.train, Temperature(tau), 0.05).value;
      CHECK(std::abs(got - double(ref)) / double(ref) < 1e-10);
    }
  }
}

TEST_CASE("bod loss edge cases") {
  const auto v = fixture::make_vocabs(4, 3, 2, 1, 0);
  BackgroundPartition empty;
  const auto l = loss_bod(empty, v.train, Temperature(0.02), 0.05);
  CHECK(l.value == 0.0);
  CHECK(l.empty);
  CHECK_THROWS_AS(loss_bod(empty, v.train, Temperature(0.02), -1.0), lbp::Error);
  std::mt19937_64 rng(4);
  BackgroundPartition bad;
  bad.positives.push_back({fixture::make_proposal(rng, 12), PseudoLabel{0, 2, 0.99}});
  CHECK_THROWS_AS(loss_bod(bad, v.train, Temperature(0.02), 0.05), lbp::Error);
}

TEST_CASE("estimated and expansion blocks partition the underlying block") {
  const auto v = fixture::make_vocabs(5, 4, 3, 10, 0);
  const Block u = v.train.underlying_block();
  const Block o = v.train.estimated_block();
  const Block a = v.train.expansion_block();
  CHECK(o.begin == u.begin);
  CHECK(o.end == a.begin);
  CHECK(a.end == u.end);
  CHECK(o.size() == 3);
  CHECK(a.size() == 10);
  CHECK(v.train.sub_background_index() == u.end);
}
