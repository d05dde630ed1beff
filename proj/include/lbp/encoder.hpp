// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lbp/core_math.hpp"

namespace lbp {

struct EncoderConfig {
  std::size_t dim = 32;         // d, output embedding dimension
  std::size_t context_dim = 16; // d_ctx, one learnable token per category
  std::size_t hidden = 64;
  std::size_t prefix_dim = 16;  // rendering of the fixed prompt words
  double input_gain = 1.5;      // W1 ~ N(0, gain^2 / fan_in)
  std::uint64_t seed = 7;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// One learnable token standing in for an unknown category's name.
struct ContextVector {
  std::vector<double> values;
  int category = 0;

  friend bool operator==(const ContextVector&, const ContextVector&) = default;
};

/// Frozen stand-in for a text encoder:
///   t = normalize(W2 * tanh(W1 * [prefix; token] + b1) + b2)
/// Named categories feed a seeded "name token" through the same network, so
/// learnable context tokens live in the same input space as real names.
class MockTextEncoder {
 public:
  explicit MockTextEncoder(const EncoderConfig& config);

  const EncoderConfig& config() const noexcept { return config_; }
  std::size_t dim() const noexcept { return config_.dim; }
  std::size_t context_dim() const noexcept { return config_.context_dim; }

  /// The token a category name renders to; deterministic in name_seed.
  std::vector<double> name_token(std::uint64_t name_seed) const;

  Embedding encode_named_category(std::uint64_t name_seed) const;
  Embedding encode_context(const ContextVector& v) const;
  Embedding encode_token(std::span<const double> token) const;

  /// J(v) * direction, including the normalization layer.
  std::vector<double> encode_context_jvp(const ContextVector& v,
                                         std::span<const double> direction) const;
  /// J(v)^T * cotangent; the backward pass used by the trainer.
  std::vector<double> encode_context_vjp(const ContextVector& v,
                                         std::span<const double> cotangent) const;

  // Frozen weights, exposed read-only for fingerprinting and serialization.
  const std::vector<double>& prefix() const noexcept { return prefix_; }
  const std::vector<double>& w1() const noexcept { return w1_; }
  const std::vector<double>& b1() const noexcept { return b1_; }
  const std::vector<double>& w2() const noexcept { return w2_; }
  const std::vector<double>& b2() const noexcept { return b2_; }

 private:
  struct Forward {
    std::vector<double> hidden;  // tanh activations
    std::vector<double> out;     // pre-normalization output
    double out_norm = 0.0;
  };
  Forward forward(std::span<const double> token) const;
  void check_token(std::span<const double> token) const;

  EncoderConfig config_;
  std::vector<double> prefix_;
  std::vector<double> w1_;  // hidden x (prefix_dim + context_dim), row-major
  std::vector<double> b1_;
  std::vector<double> w2_;  // dim x hidden, row-major
  std::vector<double> b2_;
};

/// Context tokens drawn i.i.d. from N(0, 0.02^2).
std::vector<ContextVector> init_context_vectors(std::size_t count, std::size_t context_dim,
                                                std::uint64_t seed);

inline constexpr double kContextInitStd = 0.02;

}  // namespace lbp
