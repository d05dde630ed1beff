// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "lbp/io.hpp"
#include "lbp/rng.hpp"

namespace lbp {

void validate(const TrainConfig& c) {
  require(c.learning_rate > 0.0, ErrorCode::kInvalidArgument, "learning_rate must be > 0");
  require(c.momentum >= 0.0 && c.momentum < 1.0, ErrorCode::kInvalidArgument,
          "momentum must lie in [0, 1)");
  require(c.weight_decay >= 0.0, ErrorCode::kInvalidArgument, "weight_decay must be >= 0");
  require(c.batch_images >= 1, ErrorCode::kInvalidArgument, "batch_images must be >= 1");
  require(c.tau > 0.0 && std::isfinite(c.tau), ErrorCode::kInvalidArgument, "tau must be > 0");
  require(c.gamma >= 0.0 && c.gamma <= 1.0, ErrorCode::kOutOfRange, "gamma must lie in [0, 1]");
  require(c.theta > 0.0 && c.theta < 1.0, ErrorCode::kOutOfRange, "theta must lie in (0, 1)");
  require(c.lambda_bg >= 0.0, ErrorCode::kInvalidArgument, "lambda_bg must be >= 0");
  require(c.k_min >= 1 && c.k_min <= c.k_max, ErrorCode::kInvalidArgument,
          "need 1 <= k_min <= k_max");
  require(c.filter.theta >= 0.0 && c.filter.theta <= 1.0, ErrorCode::kOutOfRange,
          "filter theta must lie in [0, 1]");
  require(c.pseudo_nms_iou > 0.0 && c.pseudo_nms_iou <= 1.0, ErrorCode::kOutOfRange,
          "pseudo_nms_iou must lie in (0, 1]");
}

// ---- flat parameter views ----

std::size_t TrainParams::size() const {
  std::size_t n = sub_background.values.size();
  for (const ContextVector& c : contexts) n += c.values.size();
  return n;
}

namespace {

template <typename Rows>
double& flat_at(Rows& rows, std::vector<double>& tail, std::size_t i) {
  for (auto& r : rows) {
    auto& v = [&]() -> std::vector<double>& {
      if constexpr (std::is_same_v<std::decay_t<decltype(r)>, ContextVector>) {
        return r.values;
      } else {
        return r;
      }
    }();
    if (i < v.size()) return v[i];
    i -= v.size();
  }
  require(i < tail.size(), ErrorCode::kOutOfRange, "parameter index out of range");
  return tail[i];
}

}  // namespace

double TrainParams::get(std::size_t i) const {
  auto& self = const_cast<TrainParams&>(*this);
  return flat_at(self.contexts, self.sub_background.values, i);
}

void TrainParams::set(std::size_t i, double v) { flat_at(contexts, sub_background.values, i) = v; }

Gradients Gradients::zeros_like(const TrainParams& p) {
  Gradients g;
  for (const ContextVector& c : p.contexts) g.contexts.emplace_back(c.values.size(), 0.0);
  g.sub_background.assign(p.sub_background.values.size(), 0.0);
  return g;
}

double Gradients::get(std::size_t i) const {
  auto& self = const_cast<Gradients&>(*this);
  return flat_at(self.contexts, self.sub_background, i);
}

void Gradients::set(std::size_t i, double v) { flat_at(contexts, sub_background, i) = v; }

double Gradients::norm() const {
  double s = 0.0;
  for (const auto& r : contexts) s += std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  s += std::inner_product(sub_background.begin(), sub_background.end(), sub_background.begin(), 0.0);
  return std::sqrt(s);
}

bool Gradients::is_finite() const {
  auto ok = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return std::all_of(contexts.begin(), contexts.end(), ok) && ok(sub_background);
}

Velocity Velocity::zeros_like(const TrainParams& p) {
  Velocity v;
  for (const ContextVector& c : p.contexts) v.contexts.emplace_back(c.values.size(), 0.0);
  v.sub_background.assign(p.sub_background.values.size(), 0.0);
  return v;
}

std::size_t LossBreakdown::count(Branch b) const {
  return static_cast<std::size_t>(std::count(branches.begin(), branches.end(), b));
}

// ---- objective ----

Vocabulary snapshot_vocab(const ObjectiveContext& ctx, const TrainParams& params) {
  require(ctx.encoder != nullptr, ErrorCode::kInvalidArgument, "objective context has no encoder");
  return build_training_vocab(ctx.base, params.contexts, params.sub_background, *ctx.encoder,
                              ctx.shape);
}

const char* to_string(Objective o) {
  switch (o) {
    case Objective::kCls: return "L_cls";
    case Objective::kBcp: return "L_bcp";
    case Objective::kRlx: return "L_rlx";
    case Objective::kBcpPrime: return "L_bcp'";
    case Objective::kBod: return "L_bod";
    case Objective::kFinal: return "L_final";
  }
  return "?";
}

LossBreakdown loss_final(const ProposalBatch& batch, const Vocabulary& vocab,
                         const BackgroundPartition& partition, const TrainConfig& config,
                         EmbeddingGrad* grad, std::span<const Branch> forced) {
  const Temperature tau(config.tau);
  LossBreakdown out;
  out.l_cls = loss_cls(batch, vocab, tau, grad).value;
  if (config.bcp) {
    BranchedLoss b = loss_bcp_prime(batch, vocab, tau, config.gamma, grad, forced);
    out.l_bcp_prime = b.value;
    out.branches = std::move(b.branches);
  }
  if (config.bod && !vocab.baseline_mode()) {
    out.l_bod = loss_bod(partition, vocab, tau, config.lambda_bg, grad).value;
  }
  out.l_final = out.l_cls + out.l_bcp_prime + out.l_bod;
  return out;
}

double evaluate_objective(Objective which, const ProposalBatch& batch, const Vocabulary& vocab,
                          const BackgroundPartition& partition, const TrainConfig& config,
                          EmbeddingGrad* grad, std::span<const Branch> forced,
                          std::vector<Branch>* branches) {
  const Temperature tau(config.tau);
  switch (which) {
    case Objective::kCls: return loss_cls(batch, vocab, tau, grad).value;
    case Objective::kBcp: return loss_bcp(batch, vocab, tau, grad).value;
    case Objective::kRlx: return loss_rlx(batch, vocab, tau, grad).value;
    case Objective::kBcpPrime: {
      BranchedLoss b = loss_bcp_prime(batch, vocab, tau, config.gamma, grad, forced);
      if (branches) *branches = std::move(b.branches);
      return b.value;
    }
    case Objective::kBod: return loss_bod(partition, vocab, tau, config.lambda_bg, grad).value;
    case Objective::kFinal: {
      LossBreakdown l = loss_final(batch, vocab, partition, config, grad, forced);
      if (branches) *branches = std::move(l.branches);
      return l.l_final;
    }
  }
  fail(ErrorCode::kInternal, "unknown objective");
}

Gradients embedding_to_param_grads(const EmbeddingGrad& grad, const Vocabulary& vocab,
                                   const ObjectiveContext& ctx, const TrainParams& params,
                                   const TrainConfig& config) {
  Gradients g = Gradients::zeros_like(params);
  const Block u = vocab.underlying_block();
  require(u.size() == params.contexts.size(), ErrorCode::kDimensionMismatch,
          "vocabulary does not match the parameter set");
  if (config.train_contexts) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      g.contexts[i] = ctx.encoder->encode_context_vjp(params.contexts[i], grad.wrt_embedding[u.begin + i]);
    }
  }
  if (config.train_sub_background) {
    // t = u / |u|  =>  dL/du = (I - t t^T) dL/dt / |u|
    const std::vector<double>& raw = params.sub_background.values;
    const Embedding& t = vocab.embedding(vocab.sub_background_index());
    const std::vector<double>& gt = grad.wrt_embedding[vocab.sub_background_index()];
    const double n = std::sqrt(std::inner_product(raw.begin(), raw.end(), raw.begin(), 0.0));
    double proj = 0.0;
    for (std::size_t k = 0; k < gt.size(); ++k) proj += t[k] * gt[k];
    for (std::size_t k = 0; k < gt.size(); ++k) g.sub_background[k] = (gt[k] - proj * t[k]) / n;
  }
  if (!g.is_finite()) {
    for (std::size_t i = 0; i < g.contexts.size(); ++i) {
      for (double x : g.contexts[i]) {
        if (!std::isfinite(x)) {
          fail(ErrorCode::kNonFinite, "non-finite gradient for context vector " + std::to_string(i));
        }
      }
    }
    fail(ErrorCode::kNonFinite, "non-finite gradient for the sub-background embedding");
  }
  return g;
}

GradientResult compute_gradients(const ProposalBatch& batch, const BackgroundPartition& partition,
                                 const ObjectiveContext& ctx, const TrainParams& params,
                                 const TrainConfig& config) {
  const Vocabulary vocab = snapshot_vocab(ctx, params);
  EmbeddingGrad eg(vocab);
  GradientResult r;
  r.loss = loss_final(batch, vocab, partition, config, &eg);
  r.grads = embedding_to_param_grads(eg, vocab, ctx, params, config);
  return r;
}

Gradients objective_gradients(Objective which, const ProposalBatch& batch,
                              const BackgroundPartition& partition, const ObjectiveContext& ctx,
                              const TrainParams& params, const TrainConfig& config,
                              std::span<const Branch> forced) {
  const Vocabulary vocab = snapshot_vocab(ctx, params);
  EmbeddingGrad eg(vocab);
  evaluate_objective(which, batch, vocab, partition, config, &eg, forced);
  return embedding_to_param_grads(eg, vocab, ctx, params, config);
}

Gradients finite_diff_gradients(const std::function<double(const TrainParams&)>& f,
                                const TrainParams& params, double h) {
  require(h > 0.0, ErrorCode::kInvalidArgument, "finite-difference step must be > 0");
  Gradients g = Gradients::zeros_like(params);
  TrainParams p = params;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = params.get(i);
    p.set(i, x + h);
    const double up = f(p);
    p.set(i, x - h);
    const double down = f(p);
    p.set(i, x);
    g.set(i, (up - down) / (2.0 * h));
  }
  return g;
}

FiniteDiffCheck finite_diff_gradients(Objective which, const ProposalBatch& batch,
                                      const BackgroundPartition& partition,
                                      const ObjectiveContext& ctx, const TrainParams& params,
                                      const TrainConfig& config, double h) {
  require(h > 0.0, ErrorCode::kInvalidArgument, "finite-difference step must be > 0");
  FiniteDiffCheck out;
  const bool branched = which == Objective::kBcpPrime || (which == Objective::kFinal && config.bcp);
  if (branched) {
    evaluate_objective(which, batch, snapshot_vocab(ctx, params), partition, config, nullptr, {},
                       &out.center_branches);
  }
  out.grads = Gradients::zeros_like(params);
  TrainParams p = params;
  auto eval = [&](const TrainParams& q, std::size_t i) {
    const Vocabulary v = snapshot_vocab(ctx, q);
    if (branched && !out.branch_straddle) {
      std::vector<Branch> natural;
      evaluate_objective(which, batch, v, partition, config, nullptr, {}, &natural);
      if (natural != out.center_branches) {
        out.branch_straddle = true;
        out.straddle_parameter = i;
      }
    }
    return evaluate_objective(which, batch, v, partition, config, nullptr, out.center_branches);
  };
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = params.get(i);
    p.set(i, x + h);
    const double up = eval(p, i);
    p.set(i, x - h);
    const double down = eval(p, i);
    p.set(i, x);
    out.grads.set(i, (up - down) / (2.0 * h));
  }
  return out;
}

void sgd_step(TrainParams& params, Velocity& velocity, const Gradients& grads, double lr,
              double momentum, double weight_decay, bool update_contexts,
              bool update_sub_background) {
  require(params.contexts.size() == grads.contexts.size() &&
              params.contexts.size() == velocity.contexts.size() &&
              params.sub_background.values.size() == grads.sub_background.size() &&
              params.sub_background.values.size() == velocity.sub_background.size(),
          ErrorCode::kDimensionMismatch, "sgd_step: parameter, gradient and velocity shapes differ");
  auto update = [&](std::vector<double>& p, std::vector<double>& v, const std::vector<double>& g) {
    require(p.size() == g.size() && p.size() == v.size(), ErrorCode::kDimensionMismatch,
            "sgd_step: parameter, gradient and velocity shapes differ");
    for (std::size_t k = 0; k < p.size(); ++k) {
      v[k] = momentum * v[k] + g[k] + weight_decay * p[k];
      p[k] -= lr * v[k];
    }
  };
  if (update_contexts) {
    for (std::size_t i = 0; i < params.contexts.size(); ++i) {
      update(params.contexts[i].values, velocity.contexts[i], grads.contexts[i]);
    }
  }
  if (update_sub_background) {
    std::vector<double>& u = params.sub_background.values;
    update(u, velocity.sub_background, grads.sub_background);
    u = Embedding::normalized(u).values();
  }
}

// ---- training loop ----

std::vector<NamedCategory> embed_categories(const MockTextEncoder& encoder,
                                            std::span<const CategoryInfo> categories) {
  std::vector<NamedCategory> out;
  for (const CategoryInfo& c : categories) {
    out.push_back({c.id, encoder.encode_named_category(c.name_seed)});
  }
  return out;
}

Vocabulary training_vocab_from_checkpoint(const Checkpoint& ckpt, const MockTextEncoder& encoder) {
  require(encoder.config() == ckpt.encoder, ErrorCode::kInvalidArgument,
          "encoder does not match the checkpoint");
  const std::vector<NamedCategory> base = embed_categories(encoder, ckpt.base_categories);
  return build_training_vocab(base, ckpt.params.contexts, ckpt.params.sub_background, encoder,
                              {ckpt.n_estimated, ckpt.n_expansion, ckpt.config.baseline_mode});
}

DiscoveryResult discover_background_categories(const Dataset& train_set, const TrainConfig& config) {
  DiscoveryResult out;
  if (config.baseline_mode) return out;
  const ForegroundBackgroundSplit split = split_fg_bg(train_set);
  const std::vector<Proposal> filtered =
      filter_background_proposals(split.background, train_set.annotations, config.filter);
  out.filtered_proposals = filtered.size();
  std::vector<Embedding> features;
  for (const Proposal& p : filtered) features.push_back(p.clip_feature);

  if (config.n_o > 0) {
    out.n_estimated = config.n_o;
  } else {
    const std::size_t k_max = std::min(config.k_max, features.empty() ? 0 : features.size() - 1);
    require(k_max >= config.k_min, ErrorCode::kInfeasible,
            "too few filtered background proposals to estimate the category count");
    out.estimate = estimate_category_count(features, config.k_min, k_max, config.seed);
    out.n_estimated = out.estimate.k;
    out.estimated = true;
  }
  require(features.size() >= out.n_estimated, ErrorCode::kInfeasible,
          "fewer filtered background proposals than clusters");
  out.centers = kmeans(features, out.n_estimated, config.seed).centers;
  return out;
}

namespace {

struct ImageIndex {
  std::map<int, ProposalBatch> by_image;
  std::vector<int> images;
};

ImageIndex index_by_image(const Dataset& ds) {
  const ForegroundBackgroundSplit split = split_fg_bg(ds);
  ImageIndex idx;
  for (const Proposal& p : split.foreground) idx.by_image[p.image].foreground.push_back(p);
  for (const Proposal& p : split.background) idx.by_image[p.image].background.push_back(p);
  for (const auto& [img, _] : idx.by_image) idx.images.push_back(img);
  return idx;
}

ProposalBatch sample_batch(const ImageIndex& idx, std::size_t count, Rng& rng) {
  std::vector<int> pool = idx.images;
  const std::size_t n = std::min(count, pool.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
  ProposalBatch batch;
  for (std::size_t i = 0; i < n; ++i) {
    const ProposalBatch& b = idx.by_image.at(pool[i]);
    batch.foreground.insert(batch.foreground.end(), b.foreground.begin(), b.foreground.end());
    batch.background.insert(batch.background.end(), b.background.begin(), b.background.end());
  }
  return batch;
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& train_set) {
  validate(config);
  require(train_set.split == "train", ErrorCode::kInvalidArgument, "train() expects the training split");
  const MockTextEncoder encoder(train_set.config.encoder);

  TrainResult result;
  result.discovery = discover_background_categories(train_set, config);

  ObjectiveContext ctx;
  ctx.encoder = &encoder;
  const std::vector<CategoryInfo> base_info = train_set.categories_with_role(CategoryRole::kBase);
  ctx.base = embed_categories(encoder, base_info);
  ctx.shape.baseline_mode = config.baseline_mode;
  if (!config.baseline_mode) {
    ctx.shape.n_estimated = result.discovery.n_estimated;
    ctx.shape.n_expansion = config.n_a;
  }

  TrainParams params;
  const std::size_t n_ctx = ctx.shape.n_estimated + ctx.shape.n_expansion;
  if (n_ctx > 0) params.contexts = init_context_vectors(n_ctx, encoder.context_dim(), config.seed);
  {
    Rng rng = make_rng({config.seed, stream::kSubBackground});
    params.sub_background.values = Embedding::normalized(gaussian_vector(rng, encoder.dim(), 1.0)).values();
  }
  Velocity velocity = Velocity::zeros_like(params);

  const ImageIndex index = index_by_image(train_set);
  require(!index.images.empty(), ErrorCode::kInvalidArgument, "training split has no proposals");
  PseudoLabelConfig plc;
  plc.filter = config.filter;
  plc.theta = config.theta;
  plc.nms_iou = config.pseudo_nms_iou;
  const bool use_bod = config.bod && !config.baseline_mode;

  Rng rng = make_rng({config.seed, stream::kTrain});
  for (std::size_t step = 0; step < config.steps; ++step) {
    const ProposalBatch batch = sample_batch(index, config.batch_images, rng);
    BackgroundPartition partition;
    if (use_bod) {
      partition = generate_pseudo_labels(batch.background, train_set.annotations,
                                         result.discovery.centers, Temperature(config.tau), plc);
    }
    GradientResult g = compute_gradients(batch, partition, ctx, params, config);
    if (!std::isfinite(g.loss.l_final)) {
      fail(ErrorCode::kNonFinite, "non-finite loss at step " + std::to_string(step + 1));
    }
    StepRecord rec;
    rec.bcp_branches = g.loss.count(Branch::kBcp);
    rec.rlx_branches = g.loss.count(Branch::kRlx);
    rec.positives = partition.positives.size();
    rec.negatives = partition.negatives.size();
    rec.loss = std::move(g.loss);
    rec.loss.branches.clear();
    result.history.steps.push_back(std::move(rec));
    sgd_step(params, velocity, g.grads, config.learning_rate, config.momentum, config.weight_decay,
             config.train_contexts, config.train_sub_background);
  }

  Checkpoint& ck = result.checkpoint;
  ck.config = config;
  ck.encoder = encoder.config();
  ck.base_categories = base_info;
  ck.n_estimated = ctx.shape.n_estimated;
  ck.n_expansion = ctx.shape.n_expansion;
  ck.params = std::move(params);
  ck.centers = result.discovery.centers;
  std::ostringstream rs;
  rs << rng;
  ck.rng_state = rs.str();
  ck.dataset_hash = dataset_fingerprint(train_set);
  ck.steps_completed = config.steps;
  for (const StepRecord& r : result.history.steps) {
    ck.bcp_branches += r.bcp_branches;
    ck.rlx_branches += r.rlx_branches;
  }
  if (!result.history.steps.empty()) {
    ck.initial_loss = result.history.steps.front().loss.l_final;
    ck.final_loss = result.history.steps.back().loss.l_final;
  }
  return result;
}

}  // namespace lbp
