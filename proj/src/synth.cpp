// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lbp/rng.hpp"

namespace lbp {

const char* to_string(CategoryRole role) {
  switch (role) {
    case CategoryRole::kBase: return "base";
    case CategoryRole::kNovel: return "novel";
    case CategoryRole::kDistractor: return "distractor";
  }
  return "?";
}

CategoryRole category_role_from_string(const std::string& s) {
  if (s == "base") return CategoryRole::kBase;
  if (s == "novel") return CategoryRole::kNovel;
  if (s == "distractor") return CategoryRole::kDistractor;
  fail(ErrorCode::kFormat, "unknown category role '" + s + "'");
}

std::vector<CategoryInfo> Dataset::categories_with_role(CategoryRole role) const {
  std::vector<CategoryInfo> out;
  for (const CategoryInfo& c : categories) {
    if (c.role == role) out.push_back(c);
  }
  return out;
}

namespace {

void validate(const ScenarioConfig& c) {
  require(c.n_base >= 1, ErrorCode::kInvalidArgument, "scenario needs at least one base category");
  require(c.sigma_feat >= 0.0 && c.sigma_det >= 0.0, ErrorCode::kInvalidArgument,
          "noise levels must be >= 0");
  require(c.min_box > 0.0 && c.min_box <= c.max_box && c.max_box < c.image_size,
          ErrorCode::kInvalidArgument, "invalid box size range");
  require(c.max_prototype_cos > -1.0 && c.max_prototype_cos <= 1.0, ErrorCode::kInvalidArgument,
          "max_prototype_cos must lie in (-1, 1]");
  require(c.match_iou > 0.0 && c.match_iou <= 1.0, ErrorCode::kInvalidArgument,
          "match_iou must lie in (0, 1]");
}

std::vector<PrototypeEntry> sample_prototypes(const ScenarioConfig& c, const MockTextEncoder& enc) {
  const std::size_t total = c.n_base + c.n_novel + c.n_distractor;
  std::vector<PrototypeEntry> out;
  std::uint64_t attempt = 0;
  while (out.size() < total) {
    require(attempt < c.prototype_budget, ErrorCode::kInfeasible,
            "prototype rejection sampling exceeded its budget; lower the separation requirement");
    const std::uint64_t name_seed = c.seed * 1000003ULL + attempt++;
    Embedding e = enc.encode_named_category(name_seed);
    const bool ok = std::all_of(out.begin(), out.end(), [&](const PrototypeEntry& p) {
      return cosine(p.embedding, e) <= c.max_prototype_cos;
    });
    if (!ok) continue;
    const std::size_t id = out.size();
    CategoryRole role = CategoryRole::kDistractor;
    if (id < c.n_base) {
      role = CategoryRole::kBase;
    } else if (id < c.n_base + c.n_novel) {
      role = CategoryRole::kNovel;
    }
    out.push_back({{static_cast<int>(id), role, name_seed}, std::move(e)});
  }
  return out;
}

Embedding noisy(const Embedding& center, double sigma, Rng& rng) {
  if (sigma == 0.0) return center;
  std::vector<double> v = center.values();
  std::normal_distribution<double> g(0.0, sigma);
  for (double& x : v) x += g(rng);
  return Embedding::normalized(v);
}

Embedding isotropic(std::size_t dim, Rng& rng) {
  return Embedding::normalized(gaussian_vector(rng, dim, 1.0));
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Box random_box(const ScenarioConfig& c, Rng& rng) {
  std::uniform_real_distribution<double> size(c.min_box, c.max_box);
  const double w = size(rng);
  const double h = size(rng);
  std::uniform_real_distribution<double> px(0.0, c.image_size - w);
  std::uniform_real_distribution<double> py(0.0, c.image_size - h);
  const double x = px(rng);
  const double y = py(rng);
  return {x, y, x + w, y + h};
}

Box jitter(const Box& b, double frac, const ScenarioConfig& c, Rng& rng) {
  const double w = b.x2 - b.x1;
  const double h = b.y2 - b.y1;
  std::uniform_real_distribution<double> u(-frac, frac);
  Box j{b.x1 + u(rng) * w, b.y1 + u(rng) * h, b.x2 + u(rng) * w, b.y2 + u(rng) * h};
  j.x1 = std::clamp(j.x1, 0.0, c.image_size - 1.0);
  j.y1 = std::clamp(j.y1, 0.0, c.image_size - 1.0);
  j.x2 = std::clamp(j.x2, j.x1 + 1.0, c.image_size);
  j.y2 = std::clamp(j.y2, j.y1 + 1.0, c.image_size);
  return j;
}

// Category weights: base categories 1 each; hidden categories follow a Zipf
// profile in id order, rescaled so their total weight equals their count.
std::vector<double> category_weights(const ScenarioConfig& c) {
  std::vector<double> w(c.n_base, 1.0);
  const std::size_t hidden = c.n_novel + c.n_distractor;
  double sum = 0.0;
  for (std::size_t r = 0; r < hidden; ++r) {
    w.push_back(std::pow(double(r + 1), -c.hidden_frequency_skew));
    sum += w.back();
  }
  for (std::size_t r = 0; r < hidden; ++r) w[c.n_base + r] *= double(hidden) / sum;
  return w;
}

Dataset generate_split(const ScenarioConfig& c, const std::vector<PrototypeEntry>& prototypes,
                       const std::string& split, std::size_t images, std::uint64_t split_tag) {
  Rng rng = make_rng({c.seed, stream::kScenario, split_tag});
  const bool reveal_novel = split == "infer";
  Dataset ds;
  ds.split = split;
  ds.config = c;
  ds.image_count = images;
  ds.oracle.prototypes = prototypes;
  for (const PrototypeEntry& p : prototypes) {
    if (p.category.role == CategoryRole::kBase ||
        (reveal_novel && p.category.role == CategoryRole::kNovel)) {
      ds.categories.push_back(p.category);
    }
  }
  auto visible = [&](int label) {
    const CategoryRole role = prototypes[static_cast<std::size_t>(label)].category.role;
    return role == CategoryRole::kBase || (reveal_novel && role == CategoryRole::kNovel);
  };

  const std::vector<double> weights = category_weights(c);
  std::discrete_distribution<int> pick_category(weights.begin(), weights.end());
  std::normal_distribution<double> rpn_object(c.rpn_object_mean, c.rpn_object_std);
  std::normal_distribution<double> rpn_clutter(c.rpn_clutter_mean, c.rpn_clutter_std);
  const std::size_t dim = c.encoder.dim;
  int next_id = 0;

  for (std::size_t img = 0; img < images; ++img) {
    const int image = static_cast<int>(img);
    std::vector<GroundTruthBox> objects;
    for (std::size_t o = 0; o < c.objects_per_image; ++o) {
      const int label = pick_category(rng);
      Box box = random_box(c, rng);
      for (int tries = 0; tries < 50; ++tries) {
        const bool clear = std::all_of(objects.begin(), objects.end(),
                                       [&](const GroundTruthBox& g) { return iou(g.box, box) < 0.3; });
        if (clear) break;
        box = random_box(c, rng);
      }
      objects.push_back({image, box, label});
    }
    for (const GroundTruthBox& g : objects) {
      ds.oracle.objects.push_back(g);
      if (visible(g.label)) ds.annotations.push_back(g);
    }

    auto match = [&](const Box& b) -> std::optional<int> {
      double best = 0.0;
      std::optional<int> label;
      for (const GroundTruthBox& g : objects) {
        if (!visible(g.label)) continue;
        const double v = iou(g.box, b);
        if (v >= c.match_iou && v > best) {
          best = v;
          label = g.label;
        }
      }
      return label;
    };

    for (const GroundTruthBox& g : objects) {
      const Embedding& proto = prototypes[static_cast<std::size_t>(g.label)].embedding;
      for (std::size_t k = 0; k < c.proposals_per_object; ++k) {
        Proposal p;
        p.id = next_id++;
        p.image = image;
        p.box = jitter(g.box, c.proposal_jitter, c, rng);
        p.rpn_score = clamp01(rpn_object(rng));
        p.clip_feature = noisy(proto, c.sigma_feat, rng);
        p.detector_feature = noisy(p.clip_feature, c.sigma_det, rng);
        p.gt_label = match(p.box);
        p.oracle.generative_label = g.label;
        ds.proposals.push_back(std::move(p));
      }
    }
    for (std::size_t k = 0; k < c.clutter_per_image; ++k) {
      Proposal p;
      p.id = next_id++;
      p.image = image;
      // Clutter stays clear of every object so it never inherits a label.
      p.box = random_box(c, rng);
      for (int tries = 0; tries < 50; ++tries) {
        const bool clear = std::all_of(objects.begin(), objects.end(), [&](const GroundTruthBox& g) {
          return iou(g.box, p.box) < c.match_iou;
        });
        if (clear) break;
        p.box = random_box(c, rng);
      }
      p.rpn_score = clamp01(rpn_clutter(rng));
      p.clip_feature = isotropic(dim, rng);
      p.detector_feature = noisy(p.clip_feature, c.sigma_det, rng);
      p.gt_label = match(p.box);
      p.oracle.generative_label = -1;
      ds.proposals.push_back(std::move(p));
    }
  }
  return ds;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config) {
  validate(config);
  const MockTextEncoder encoder(config.encoder);
  Scenario s;
  s.config = config;
  s.prototypes = sample_prototypes(config, encoder);
  s.train = generate_split(config, s.prototypes, "train", config.train_images, 1);
  s.infer = generate_split(config, s.prototypes, "infer", config.infer_images, 2);
  return s;
}

ForegroundBackgroundSplit split_fg_bg(const Dataset& dataset) {
  std::vector<int> base_ids;
  for (const CategoryInfo& c : dataset.categories) {
    if (c.role == CategoryRole::kBase) base_ids.push_back(c.id);
  }
  ForegroundBackgroundSplit out;
  for (const Proposal& p : dataset.proposals) {
    const bool is_base = p.gt_label && std::find(base_ids.begin(), base_ids.end(), *p.gt_label) != base_ids.end();
    if (is_base) {
      out.foreground.push_back(p);
    } else {
      Proposal q = p;
      q.gt_label.reset();
      out.background.push_back(std::move(q));
    }
  }
  return out;
}

BlobSet generate_blobs(std::size_t n_blobs, std::size_t points_per_blob, std::size_t dim,
                       double separation_ratio, std::uint64_t seed) {
  require(n_blobs >= 1 && dim >= 2 && separation_ratio > 0.0, ErrorCode::kInvalidArgument,
          "generate_blobs: invalid arguments");
  Rng rng = make_rng({seed, stream::kScenario, 0xb10b});
  BlobSet out;
  for (std::size_t b = 0; b < n_blobs; ++b) out.centers.push_back(isotropic(dim, rng));
  double min_sep = 2.0;
  for (std::size_t a = 0; a < n_blobs; ++a) {
    for (std::size_t b = a + 1; b < n_blobs; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double t = out.centers[a][i] - out.centers[b][i];
        s += t * t;
      }
      min_sep = std::min(min_sep, std::sqrt(s));
    }
  }
  const double sigma = min_sep / separation_ratio;
  for (std::size_t b = 0; b < n_blobs; ++b) {
    for (std::size_t k = 0; k < points_per_blob; ++k) {
      out.points.push_back(noisy(out.centers[b], sigma, rng));
      out.labels.push_back(b);
    }
  }
  return out;
}

}  // namespace lbp
