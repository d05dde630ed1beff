// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lbp/error.hpp"

namespace lbp {

/// Fixed-dimension real vector. Encoders and generators hand these out
/// unit-normalized; arbitrary vectors are allowed for gradient work.
class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::size_t dim) : values_(dim, 0.0) {}
  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}

  /// Copies `values` scaled to unit length. Throws on a zero or non-finite input.
  static Embedding normalized(std::span<const double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> span() const noexcept { return values_; }
  std::span<double> span() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  double norm() const;
  bool is_finite() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

class Temperature {
 public:
  explicit Temperature(double tau);
  double value() const noexcept { return tau_; }

 private:
  double tau_;
};

/// A strictly positive score kept as its logarithm. Linear values overflow
/// long before the log does, so every sum over scores goes through here.
struct LogScore {
  double log = -INFINITY;

  double linear() const { return std::exp(log); }
  static LogScore from_linear(double v) { return LogScore{std::log(v)}; }
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

double cosine(const Embedding& a, const Embedding& b);
double cos_exp_score(const Embedding& a, const Embedding& b, Temperature tau);
LogScore log_cos_exp_score(const Embedding& a, const Embedding& b, Temperature tau);

/// Max-shifted log(sum(exp(x))). Returns -inf for an empty range or all -inf.
double logsumexp(std::span<const double> x);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> x);

std::vector<double> log_softmax(std::span<const double> logits);
std::vector<double> softmax(std::span<const double> logits);

/// cos(query, c)/tau for every category, in category order.
std::vector<double> cosine_logits(const Embedding& query, std::span<const Embedding> categories,
                                  Temperature tau);

std::vector<double> softmax_probs(const Embedding& query, std::span<const Embedding> categories,
                                  Temperature tau);

/// Index of the largest entry; ties go to the smaller index.
std::size_t argmax(std::span<const double> x);

/// d cos(a, b) / d a, for arbitrary nonzero a and b.
std::vector<double> cosine_grad_first(const Embedding& a, const Embedding& b);

}  // namespace lbp
