// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "lbp/rng.hpp"

namespace lbp {

namespace {

std::vector<int> column_ids(const Vocabulary& vocab) {
  std::vector<int> out;
  for (std::size_t c = vocab.base_block().begin; c < vocab.novel_block().end; ++c) {
    out.push_back(vocab.id(c).index);
  }
  return out;
}

}  // namespace

EvalReport evaluate_vocab(const Vocabulary& vocab, const Dataset& infer, double tau,
                          const EvalConfig& config) {
  require(vocab.is_inference(), ErrorCode::kInvalidArgument, "evaluation needs an inference vocabulary");
  require(infer.config.encoder.dim == vocab.dim(), ErrorCode::kDimensionMismatch,
          "dataset and checkpoint embedding dimensions differ");
  const Temperature t(tau);
  const ShrinkingFactors cache(vocab, t);

  EvalReport r;
  r.rectified = config.rectify;
  r.recall_threshold = config.recall_threshold;
  r.columns = column_ids(vocab);
  r.shrinking_factors = cache.factors();
  if (!r.shrinking_factors.empty()) {
    r.mean_shrinking_factor = compensated_sum(r.shrinking_factors) / double(r.shrinking_factors.size());
  }

  const std::size_t n_cols = r.columns.size();
  std::map<int, std::size_t> row_of;
  for (std::size_t c = 0; c < n_cols; ++c) {
    row_of[r.columns[c]] = c;
    r.confusion.push_back({r.columns[c], std::vector<std::size_t>(n_cols + 1, 0)});
  }

  std::size_t base_ok = 0, novel_ok = 0, novel_recalled = 0;
  for (const Proposal& p : infer.proposals) {
    const auto row = row_of.find(p.oracle.generative_label);
    if (row == row_of.end()) continue;
    require(p.detector_feature.dim() == vocab.dim(), ErrorCode::kDimensionMismatch,
            "proposal feature dimension differs from the vocabulary");
    const RectifiedScores s = inference_probs(p.detector_feature, vocab, t, config.rectify, &cache);
    const std::size_t best = argmax(s.probabilities);
    const bool background = s.background_mass > s.probabilities[best];
    const std::size_t col = background ? n_cols : best;
    r.confusion[row->second].counts[col] += 1;

    const bool novel = vocab.novel_block().contains(row->second);
    const bool correct = col == row->second;
    if (novel) {
      ++r.novel_instances;
      novel_ok += correct;
      novel_recalled += correct && s.probabilities[best] >= config.recall_threshold;
    } else {
      ++r.base_instances;
      base_ok += correct;
    }
  }
  if (r.novel_instances > 0) {
    r.novel_top1 = double(novel_ok) / double(r.novel_instances);
    r.novel_recall = double(novel_recalled) / double(r.novel_instances);
  }
  if (r.base_instances > 0) r.base_top1 = double(base_ok) / double(r.base_instances);
  return r;
}

Vocabulary inference_vocab_from_checkpoint(const Checkpoint& checkpoint, const Dataset& infer) {
  require(infer.config.encoder == checkpoint.encoder, ErrorCode::kInvalidArgument,
          "dataset encoder does not match the checkpoint");
  const MockTextEncoder encoder(checkpoint.encoder);
  const Vocabulary training = training_vocab_from_checkpoint(checkpoint, encoder);
  const std::vector<NamedCategory> novel =
      embed_categories(encoder, infer.categories_with_role(CategoryRole::kNovel));
  return build_inference_vocab(training, novel);
}

EvalReport evaluate(const Checkpoint& checkpoint, const Dataset& infer, const EvalConfig& config) {
  const Vocabulary vocab = inference_vocab_from_checkpoint(checkpoint, infer);
  EvalReport r = evaluate_vocab(vocab, infer, checkpoint.config.tau, config);
  r.bcp_branches = checkpoint.bcp_branches;
  r.rlx_branches = checkpoint.rlx_branches;
  return r;
}

RectifyReport rectify_report(const Checkpoint& checkpoint, const Dataset& infer,
                             std::size_t max_proposals) {
  const Vocabulary vocab = inference_vocab_from_checkpoint(checkpoint, infer);
  const Temperature t(checkpoint.config.tau);
  const ShrinkingFactors cache(vocab, t);
  RectifyReport r;
  r.tau = t.value();
  r.columns = column_ids(vocab);
  r.factors = cache.factors();
  for (const Proposal& p : infer.proposals) {
    if (r.proposals.size() >= max_proposals) break;
    if (p.oracle.generative_label < 0) continue;
    RectifyReport::ProposalScores s;
    s.proposal = p.id;
    s.unrectified = inference_probs(p.detector_feature, vocab, t, false, &cache).probabilities;
    s.rectified = inference_probs(p.detector_feature, vocab, t, true, &cache).probabilities;
    r.proposals.push_back(std::move(s));
  }
  return r;
}

// ---- ablation ----

const char* to_string(Combination c) {
  switch (c) {
    case Combination::kBaseline: return "baseline";
    case Combination::kBcp: return "bcp";
    case Combination::kBod: return "bod";
    case Combination::kBcpIpr: return "bcp+ipr";
    case Combination::kBodIpr: return "bod+ipr";
    case Combination::kFull: return "full";
  }
  return "?";
}

Combination combination_from_string(const std::string& s) {
  for (Combination c : {Combination::kBaseline, Combination::kBcp, Combination::kBod,
                        Combination::kBcpIpr, Combination::kBodIpr, Combination::kFull}) {
    if (s == to_string(c)) return c;
  }
  fail(ErrorCode::kFormat, "unknown ablation combination '" + s + "'");
}

TrainConfig apply_combination(TrainConfig base, Combination c) {
  base.baseline_mode = c == Combination::kBaseline;
  base.bcp = c != Combination::kBod && c != Combination::kBodIpr;
  base.bod = c == Combination::kBod || c == Combination::kBodIpr || c == Combination::kFull;
  return base;
}

bool uses_ipr(Combination c) {
  return c == Combination::kBcpIpr || c == Combination::kBodIpr || c == Combination::kFull;
}

std::vector<double> AblationTable::novel_top1(Combination c) const {
  std::vector<double> out;
  for (const AblationRow& r : rows) {
    if (r.combination == c) out.push_back(r.report.novel_top1);
  }
  return out;
}

AblationTable run_ablation(const AblationSpec& spec, const ScenarioConfig& scenario,
                           const TrainConfig& train_config, const EvalConfig& eval) {
  require(!spec.combinations.empty(), ErrorCode::kInvalidArgument, "ablation spec has no combinations");
  require(spec.repetitions >= 1, ErrorCode::kInvalidArgument, "ablation needs at least one repetition");
  AblationTable table;
  for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
    const std::uint64_t seed = spec.base_seed + rep;
    ScenarioConfig sc = scenario;
    sc.seed = seed;
    const Scenario data = generate_scenario(sc);

    std::map<std::tuple<bool, bool, bool>, TrainResult> trained;
    for (Combination c : spec.combinations) {
      TrainConfig tc = apply_combination(train_config, c);
      tc.seed = seed;
      const auto key = std::make_tuple(tc.baseline_mode, tc.bcp, tc.bod);
      auto it = trained.find(key);
      if (it == trained.end()) {
        try {
          it = trained.emplace(key, train(tc, data.train)).first;
        } catch (const Error& e) {
          fail(e.code(), std::string("ablation '") + to_string(c) + "': " + e.what());
        }
      }
      const TrainResult& tr = it->second;
      EvalConfig ec = eval;
      ec.rectify = uses_ipr(c);
      AblationRow row;
      row.combination = c;
      row.seed = seed;
      row.n_estimated = tr.checkpoint.n_estimated;
      row.initial_loss = tr.checkpoint.initial_loss;
      row.final_loss = tr.checkpoint.final_loss;
      row.report = evaluate(tr.checkpoint, data.infer, ec);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ---- gradient oracle table ----

double gradcheck_tolerance(double tau) { return tau >= 1.0 ? 1e-5 : 1e-4; }

bool GradcheckTable::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const GradcheckRow& r) { return r.pass; });
}

std::size_t GradcheckTable::straddles() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const GradcheckRow& r) { return r.straddle; }));
}

GradcheckInstance make_gradcheck_instance(std::uint64_t seed, double tau) {
  Rng rng = make_rng({seed, stream::kGradcheck});
  EncoderConfig ec;
  ec.dim = 12;
  ec.context_dim = 6;
  ec.hidden = 16;
  ec.prefix_dim = 6;
  ec.seed = seed;

  GradcheckInstance g;
  g.encoder = std::make_shared<const MockTextEncoder>(ec);
  const std::size_t n_base = 4, n_o = 2, n_a = 2;
  g.context.encoder = g.encoder.get();
  for (std::size_t i = 0; i < n_base; ++i) {
    g.context.base.push_back({static_cast<int>(i), g.encoder->encode_named_category(seed * 131 + i)});
  }
  g.context.shape = {n_o, n_a, false};
  for (std::size_t i = 0; i < n_o + n_a; ++i) {
    g.params.contexts.push_back({gaussian_vector(rng, ec.context_dim, 1.0), static_cast<int>(i)});
  }
  g.params.sub_background.values = gaussian_vector(rng, ec.dim, 1.0);

  auto feature = [&]() { return Embedding::normalized(gaussian_vector(rng, ec.dim, 1.0)); };
  std::uniform_int_distribution<int> base_label(0, static_cast<int>(n_base) - 1);
  std::uniform_int_distribution<std::size_t> pseudo(0, n_o - 1);
  for (int i = 0; i < 5; ++i) {
    Proposal p;
    p.id = i;
    p.detector_feature = feature();
    p.clip_feature = p.detector_feature;
    p.gt_label = base_label(rng);
    g.batch.foreground.push_back(std::move(p));
  }
  for (int i = 0; i < 6; ++i) {
    Proposal p;
    p.id = 100 + i;
    p.detector_feature = feature();
    p.clip_feature = p.detector_feature;
    g.batch.background.push_back(std::move(p));
  }
  for (int i = 0; i < 3; ++i) {
    PositiveBackground pb;
    pb.proposal.id = 200 + i;
    pb.proposal.detector_feature = feature();
    pb.proposal.clip_feature = pb.proposal.detector_feature;
    pb.label.proposal = static_cast<std::size_t>(i);
    pb.label.cls = pseudo(rng);
    pb.label.score = 1.0;
    g.partition.positives.push_back(std::move(pb));
  }
  for (int i = 0; i < 3; ++i) {
    Proposal p;
    p.id = 300 + i;
    p.detector_feature = feature();
    p.clip_feature = p.detector_feature;
    g.partition.negatives.push_back(std::move(p));
  }
  g.config.tau = tau;
  return g;
}

double relative_error(const Gradients& a, const Gradients& b) {
  Gradients diff = a;
  require(a.contexts.size() == b.contexts.size() && a.sub_background.size() == b.sub_background.size(),
          ErrorCode::kDimensionMismatch, "gradient shapes differ");
  const std::size_t n = [&] {
    std::size_t s = a.sub_background.size();
    for (const auto& r : a.contexts) s += r.size();
    return s;
  }();
  for (std::size_t i = 0; i < n; ++i) diff.set(i, a.get(i) - b.get(i));
  return diff.norm() / std::max({a.norm(), b.norm(), 1e-12});
}

GradcheckTable run_gradcheck(const GradcheckConfig& config) {
  require(config.instances >= 1 && !config.taus.empty() && config.h > 0.0,
          ErrorCode::kInvalidArgument, "invalid gradcheck configuration");
  GradcheckTable table;
  const Objective all[] = {Objective::kCls, Objective::kBcp, Objective::kRlx,
                           Objective::kBcpPrime, Objective::kBod, Objective::kFinal};
  for (double tau : config.taus) {
    for (std::size_t i = 0; i < config.instances; ++i) {
      const GradcheckInstance g = make_gradcheck_instance(config.seed * 1000 + i, tau);
      for (Objective o : all) {
        const FiniteDiffCheck fd =
            finite_diff_gradients(o, g.batch, g.partition, g.context, g.params, g.config, config.h);
        const Gradients an = objective_gradients(o, g.batch, g.partition, g.context, g.params, g.config,
                                                 fd.center_branches);
        GradcheckRow row;
        row.objective = o;
        row.tau = tau;
        row.instance = i;
        row.relative_error = relative_error(an, fd.grads);
        row.tolerance = gradcheck_tolerance(tau);
        row.straddle = fd.branch_straddle;
        row.pass = row.straddle || row.relative_error <= row.tolerance;
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

}  // namespace lbp
