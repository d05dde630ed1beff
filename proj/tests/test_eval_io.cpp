// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "lbp/error.hpp"
#include "lbp/eval.hpp"
#include "lbp/io.hpp"

using namespace lbp;

namespace {

ScenarioConfig small_scenario() {
  ScenarioConfig c;
  c.train_images = 16;
  c.infer_images = 12;
  return c;
}

struct OracleVocab {
  std::vector<NamedCategory> base, novel;
};

OracleVocab oracle_categories(const Scenario& s) {
  OracleVocab o;
  for (const PrototypeEntry& p : s.prototypes) {
    if (p.category.role == CategoryRole::kBase) o.base.push_back({p.category.id, p.embedding});
    if (p.category.role == CategoryRole::kNovel) o.novel.push_back({p.category.id, p.embedding});
  }
  return o;
}

std::vector<Embedding> prototype_embeddings(const Scenario& s) {
  std::vector<Embedding> out;
  for (const auto& p : s.prototypes) out.push_back(p.embedding);
  return out;
}

}  // namespace

TEST_CASE("perfect information reaches the ceiling") {
  ScenarioConfig c = small_scenario();
  c.sigma_feat = 0.0;
  c.sigma_det = 0.0;
  const Scenario s = generate_scenario(c);
  const OracleVocab o = oracle_categories(s);
  const MockTextEncoder enc(c.encoder);
  std::mt19937_64 rng(1);
  SubBackgroundEmbedding sub{fixture::orthogonal_to(prototype_embeddings(s), rng, c.encoder.dim).values()};
  const Vocabulary train = build_training_vocab(o.base, {}, sub, enc, {0, 0, true});
  const Vocabulary infer = build_inference_vocab(train, o.novel);
  const EvalReport r = evaluate_vocab(infer, s.infer, 0.02, EvalConfig{});
  CHECK(r.novel_instances > 0);
  CHECK(r.base_instances > 0);
  CHECK(r.novel_top1 == 1.0);
  CHECK(r.base_top1 == 1.0);
  CHECK(r.novel_recall == 1.0);
  for (const ConfusionRow& row : r.confusion) CHECK(row.counts.back() == 0);
}

TEST_CASE("rectification is the identity without novel categories") {
  const Scenario s = generate_scenario(small_scenario());
  const OracleVocab o = oracle_categories(s);
  const MockTextEncoder enc(s.config.encoder);
  const auto ctx = init_context_vectors(4, enc.context_dim(), 3);
  std::mt19937_64 rng(2);
  SubBackgroundEmbedding sub{oracle::random_unit(rng, enc.dim()).values()};
  const Vocabulary train = build_training_vocab(o.base, ctx, sub, enc, {2, 2, false});
  const Vocabulary infer = build_inference_vocab(train, {});
  EvalConfig on, off;
  off.rectify = false;
  EvalReport a = evaluate_vocab(infer, s.infer, 0.02, on);
  const EvalReport b = evaluate_vocab(infer, s.infer, 0.02, off);
  for (double f : a.shrinking_factors) CHECK(f == 1.0);
  CHECK(a.rectified);
  a.rectified = false;
  CHECK(a == b);
  CHECK(a.novel_instances == 0);
}

TEST_CASE("evaluation checks the vocabulary") {
  const Scenario s = generate_scenario(small_scenario());
  const OracleVocab o = oracle_categories(s);
  const MockTextEncoder enc(s.config.encoder);
  const Vocabulary train = build_training_vocab(o.base, {}, {o.base[0].embedding.values()}, enc, {0, 0, true});
  CHECK_THROWS_AS(evaluate_vocab(train, s.infer, 0.02, EvalConfig{}), lbp::Error);
}

TEST_CASE("trained checkpoint evaluates deterministically") {
  const Scenario s = generate_scenario(small_scenario());
  TrainConfig t;
  t.steps = 10;
  const TrainResult r = train(t, s.train);
  const EvalReport a = evaluate(r.checkpoint, s.infer, EvalConfig{});
  CHECK(a == evaluate(r.checkpoint, s.infer, EvalConfig{}));
  CHECK(a.novel_top1 >= 0.0);
  CHECK(a.novel_top1 <= 1.0);
  CHECK(a.novel_recall <= a.novel_top1);
  CHECK(a.bcp_branches == r.checkpoint.bcp_branches);
  std::size_t total = 0;
  for (const auto& row : a.confusion) {
    for (std::size_t n : row.counts) total += n;
  }
  CHECK(total == a.novel_instances + a.base_instances);
  const RectifyReport rr = rectify_report(r.checkpoint, s.infer, 5);
  CHECK(rr.proposals.size() <= 5);
  for (const auto& p : rr.proposals) {
    for (std::size_t i = 0; i < p.rectified.size(); ++i) CHECK(p.rectified[i] >= p.unrectified[i] - 1e-15);
  }
}

TEST_CASE("eval report round trip") {
  EvalReport r;
  r.novel_top1 = 0.1 + 0.2;
  r.base_top1 = 1.0 / 3.0;
  r.novel_recall = 0.25;
  r.novel_instances = 7;
  r.base_instances = 11;
  r.columns = {0, 1, 100};
  r.confusion = {{0, {1, 2, 3, 4}}, {1, {0, 0, 1, 0}}, {100, {5, 0, 0, 1}}};
  r.shrinking_factors = {0.123456789012345678, 1.0};
  r.mean_shrinking_factor = 0.5617283945;
  r.bcp_branches = 9;
  r.rlx_branches = 2;
  r.rectified = true;
  CHECK(parse_eval_report(render_eval_report(r)) == r);
  CHECK(render_eval_report(parse_eval_report(render_eval_report(r))) == render_eval_report(r));
  CHECK(!format_eval_report(r).empty());
  CHECK_THROWS_AS(parse_eval_report("{not json"), lbp::Error);
}

TEST_CASE("dataset and checkpoint round trip") {
  const Scenario s = generate_scenario(small_scenario());
  for (const Dataset* d : {&s.train, &s.infer}) {
    const std::string text = render_dataset(*d);
    const Dataset back = parse_dataset(text);
    CHECK(back == *d);
    CHECK(render_dataset(back) == text);
    CHECK(dataset_fingerprint(back) == dataset_fingerprint(*d));
  }
  CHECK(dataset_fingerprint(s.train) != dataset_fingerprint(s.infer));

  TrainConfig t;
  t.steps = 4;
  const Checkpoint ck = train(t, s.train).checkpoint;
  const std::string text = render_checkpoint(ck);
  CHECK(parse_checkpoint(text) == ck);
  CHECK(render_checkpoint(parse_checkpoint(text)) == text);
  CHECK_THROWS_AS(parse_checkpoint("{}"), lbp::Error);
}

TEST_CASE("ablation round trip and single combination") {
  AblationSpec spec;
  spec.combinations = {Combination::kBcp};
  spec.repetitions = 1;
  spec.base_seed = 4;
  TrainConfig t;
  t.steps = 5;
  const AblationTable table = run_ablation(spec, small_scenario(), t, EvalConfig{});
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].combination == Combination::kBcp);
  CHECK(table.rows[0].seed == 4);
  CHECK(table.novel_top1(Combination::kBcp).size() == 1);
  CHECK(table.novel_top1(Combination::kFull).empty());
  const std::string text = render_ablation(table);
  CHECK(parse_ablation(text) == table);
  CHECK(render_ablation(parse_ablation(text)) == text);
  CHECK(!format_ablation(table).empty());

  spec.combinations.clear();
  CHECK_THROWS_AS(run_ablation(spec, small_scenario(), t, EvalConfig{}), lbp::Error);
}

TEST_CASE("combinations") {
  const TrainConfig base;
  for (Combination c : {Combination::kBaseline, Combination::kBcp, Combination::kBod, Combination::kBcpIpr,
                        Combination::kBodIpr, Combination::kFull}) {
    CHECK(combination_from_string(to_string(c)) == c);
  }
  CHECK(apply_combination(base, Combination::kBaseline).baseline_mode);
  CHECK(!apply_combination(base, Combination::kBaseline).bod);
  const TrainConfig bcp = apply_combination(base, Combination::kBcp);
  CHECK((bcp.bcp && !bcp.bod && !bcp.baseline_mode));
  const TrainConfig bod = apply_combination(base, Combination::kBod);
  CHECK((!bod.bcp && bod.bod));
  const TrainConfig full = apply_combination(base, Combination::kFull);
  CHECK((full.bcp && full.bod && !full.baseline_mode));
  CHECK(apply_combination(base, Combination::kBcpIpr) == bcp);
  CHECK(uses_ipr(Combination::kFull));
  CHECK(uses_ipr(Combination::kBcpIpr));
  CHECK(!uses_ipr(Combination::kBcp));
  CHECK(!uses_ipr(Combination::kBaseline));
  CHECK_THROWS_AS(combination_from_string("nope"), lbp::Error);
}

TEST_CASE("median") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0}) == 3.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), lbp::Error);
}

TEST_CASE("lab config parse and render") {
  const LabConfig d;
  const LabConfig back = parse_lab_config(render_lab_config(d));
  CHECK(back.scenario == d.scenario);
  CHECK(back.train == d.train);
  CHECK(back.eval == d.eval);
  CHECK(back.ablation == d.ablation);
  CHECK(back.gradcheck == d.gradcheck);

  const LabConfig partial = parse_lab_config(R"({"train": {"tau": 0.05, "steps": 3}})");
  CHECK(partial.train.tau == 0.05);
  CHECK(partial.train.steps == 3);
  CHECK(partial.train.gamma == d.train.gamma);
  CHECK(partial.scenario == d.scenario);

  CHECK_THROWS_AS(parse_lab_config(R"({"train": {"tua": 0.05}})"), lbp::Error);
  CHECK_THROWS_AS(parse_lab_config(R"({"trian": {}})"), lbp::Error);
  CHECK_THROWS_AS(parse_lab_config(R"({"train": {"tau": "x"}})"), lbp::Error);
}

TEST_CASE("overrides and hashes") {
  LabConfig c;
  const std::uint64_t h0 = config_hash(c);
  CHECK(h0 == config_hash(LabConfig{}));
  apply_override(c, "train.gamma=0.1");
  CHECK(c.train.gamma == 0.1);
  CHECK(config_hash(c) != h0);
  CHECK(config_hash(c.train) != config_hash(LabConfig{}.train));
  CHECK(config_hash(c.scenario) == config_hash(LabConfig{}.scenario));
  apply_override(c, "train.bod=false");
  CHECK(!c.train.bod);
  apply_override(c, "scenario.seed=7");
  CHECK(c.scenario.seed == 7);
  CHECK_THROWS_AS(apply_override(c, "train.nothing=1"), lbp::Error);
  CHECK_THROWS_AS(apply_override(c, "no_equals_sign"), lbp::Error);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  CHECK(hex64(h0).size() == 16);
}
