// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/core_math.hpp"

#include <algorithm>
#include <limits>

namespace lbp {

Embedding Embedding::normalized(std::span<const double> values) {
  const double n = norm2(values);
  require(std::isfinite(n), ErrorCode::kNonFinite, "embedding has non-finite entries");
  require(n > 0.0, ErrorCode::kInvalidArgument, "cannot normalize a zero vector");
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v /= n;
  return Embedding(std::move(out));
}

double Embedding::norm() const { return norm2(values_); }

bool Embedding::is_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Temperature::Temperature(double tau) : tau_(tau) {
  require(tau > 0.0 && std::isfinite(tau), ErrorCode::kInvalidArgument,
          "temperature must be positive and finite");
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::kDimensionMismatch, "dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  // Scaled to avoid overflow in the squares.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : a) {
    const double r = v / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

double cosine(const Embedding& a, const Embedding& b) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch, "cosine: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  require(na > 0.0 && nb > 0.0, ErrorCode::kInvalidArgument, "cosine: zero-norm input");
  return std::clamp(dot(a.span(), b.span()) / (na * nb), -1.0, 1.0);
}

LogScore log_cos_exp_score(const Embedding& a, const Embedding& b, Temperature tau) {
  return LogScore{cosine(a, b) / tau.value()};
}

double cos_exp_score(const Embedding& a, const Embedding& b, Temperature tau) {
  return log_cos_exp_score(a, b, tau).linear();
}

double logsumexp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

double compensated_sum(std::span<const double> x) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : x) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  require(!logits.empty(), ErrorCode::kInvalidArgument, "softmax over an empty set");
  const double lse = logsumexp(logits);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

std::vector<double> cosine_logits(const Embedding& query, std::span<const Embedding> categories,
                                  Temperature tau) {
  std::vector<double> z(categories.size());
  for (std::size_t i = 0; i < categories.size(); ++i) {
    z[i] = cosine(query, categories[i]) / tau.value();
  }
  return z;
}

std::vector<double> softmax_probs(const Embedding& query, std::span<const Embedding> categories,
                                  Temperature tau) {
  require(!categories.empty(), ErrorCode::kInvalidArgument, "softmax_probs: empty category list");
  return softmax(cosine_logits(query, categories, tau));
}

std::size_t argmax(std::span<const double> x) {
  require(!x.empty(), ErrorCode::kInvalidArgument, "argmax of an empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

std::vector<double> cosine_grad_first(const Embedding& a, const Embedding& b) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch, "cosine: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  require(na > 0.0 && nb > 0.0, ErrorCode::kInvalidArgument, "cosine: zero-norm input");
  const double c = dot(a.span(), b.span()) / (na * nb);
  std::vector<double> g(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) g[i] = (b[i] / nb - c * a[i] / na) / na;
  return g;
}

}  // namespace lbp
