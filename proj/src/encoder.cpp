// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lbp/encoder.hpp"

#include <cmath>

#include "lbp/rng.hpp"

namespace lbp {

MockTextEncoder::MockTextEncoder(const EncoderConfig& config) : config_(config) {
  require(config.dim > 0 && config.context_dim > 0 && config.hidden > 0, ErrorCode::kInvalidArgument,
          "encoder dimensions must be positive");
  Rng rng = make_rng({config.seed, stream::kEncoder});
  const std::size_t fan_in = config.prefix_dim + config.context_dim;
  prefix_ = gaussian_vector(rng, config.prefix_dim, 1.0);
  w1_ = gaussian_vector(rng, config.hidden * fan_in, config.input_gain / std::sqrt(double(fan_in)));
  b1_ = gaussian_vector(rng, config.hidden, 0.1);
  w2_ = gaussian_vector(rng, config.dim * config.hidden, 1.0 / std::sqrt(double(config.hidden)));
  b2_ = gaussian_vector(rng, config.dim, 0.01);
}

std::vector<double> MockTextEncoder::name_token(std::uint64_t name_seed) const {
  Rng rng = make_rng({name_seed, stream::kNameToken});
  return gaussian_vector(rng, config_.context_dim, 1.0);
}

void MockTextEncoder::check_token(std::span<const double> token) const {
  require(token.size() == config_.context_dim, ErrorCode::kDimensionMismatch,
          "context vector dimension does not match the encoder");
}

MockTextEncoder::Forward MockTextEncoder::forward(std::span<const double> token) const {
  check_token(token);
  const std::size_t p = config_.prefix_dim;
  const std::size_t fan_in = p + config_.context_dim;
  Forward f;
  f.hidden.resize(config_.hidden);
  for (std::size_t j = 0; j < config_.hidden; ++j) {
    const double* row = &w1_[j * fan_in];
    double a = b1_[j];
    for (std::size_t i = 0; i < p; ++i) a += row[i] * prefix_[i];
    for (std::size_t i = 0; i < token.size(); ++i) a += row[p + i] * token[i];
    f.hidden[j] = std::tanh(a);
  }
  f.out.resize(config_.dim);
  for (std::size_t k = 0; k < config_.dim; ++k) {
    const double* row = &w2_[k * config_.hidden];
    double o = b2_[k];
    for (std::size_t j = 0; j < config_.hidden; ++j) o += row[j] * f.hidden[j];
    f.out[k] = o;
  }
  f.out_norm = norm2(f.out);
  require(f.out_norm > 0.0 && std::isfinite(f.out_norm), ErrorCode::kNonFinite,
          "encoder produced a degenerate output");
  return f;
}

Embedding MockTextEncoder::encode_token(std::span<const double> token) const {
  return Embedding::normalized(forward(token).out);
}

Embedding MockTextEncoder::encode_named_category(std::uint64_t name_seed) const {
  return encode_token(name_token(name_seed));
}

Embedding MockTextEncoder::encode_context(const ContextVector& v) const {
  return encode_token(v.values);
}

std::vector<double> MockTextEncoder::encode_context_jvp(const ContextVector& v,
                                                        std::span<const double> direction) const {
  require(direction.size() == config_.context_dim, ErrorCode::kDimensionMismatch,
          "jvp direction dimension does not match the encoder");
  const Forward f = forward(v.values);
  const std::size_t p = config_.prefix_dim;
  const std::size_t fan_in = p + config_.context_dim;

  std::vector<double> dh(config_.hidden);
  for (std::size_t j = 0; j < config_.hidden; ++j) {
    const double* row = &w1_[j * fan_in + p];
    double da = 0.0;
    for (std::size_t i = 0; i < direction.size(); ++i) da += row[i] * direction[i];
    dh[j] = (1.0 - f.hidden[j] * f.hidden[j]) * da;
  }
  std::vector<double> dout(config_.dim);
  for (std::size_t k = 0; k < config_.dim; ++k) {
    const double* row = &w2_[k * config_.hidden];
    double s = 0.0;
    for (std::size_t j = 0; j < config_.hidden; ++j) s += row[j] * dh[j];
    dout[k] = s;
  }
  // d(o/|o|) = (I - t t^T) do / |o|
  const double n = f.out_norm;
  double t_dot = 0.0;
  for (std::size_t k = 0; k < config_.dim; ++k) t_dot += (f.out[k] / n) * dout[k];
  for (std::size_t k = 0; k < config_.dim; ++k) dout[k] = (dout[k] - (f.out[k] / n) * t_dot) / n;
  return dout;
}

std::vector<double> MockTextEncoder::encode_context_vjp(const ContextVector& v,
                                                        std::span<const double> cotangent) const {
  require(cotangent.size() == config_.dim, ErrorCode::kDimensionMismatch,
          "vjp cotangent dimension does not match the encoder");
  const Forward f = forward(v.values);
  const std::size_t p = config_.prefix_dim;
  const std::size_t fan_in = p + config_.context_dim;
  const double n = f.out_norm;

  double t_dot = 0.0;
  for (std::size_t k = 0; k < config_.dim; ++k) t_dot += (f.out[k] / n) * cotangent[k];
  std::vector<double> gout(config_.dim);
  for (std::size_t k = 0; k < config_.dim; ++k) gout[k] = (cotangent[k] - (f.out[k] / n) * t_dot) / n;

  std::vector<double> ga(config_.hidden, 0.0);
  for (std::size_t k = 0; k < config_.dim; ++k) {
    const double* row = &w2_[k * config_.hidden];
    for (std::size_t j = 0; j < config_.hidden; ++j) ga[j] += row[j] * gout[k];
  }
  for (std::size_t j = 0; j < config_.hidden; ++j) ga[j] *= 1.0 - f.hidden[j] * f.hidden[j];

  std::vector<double> gv(config_.context_dim, 0.0);
  for (std::size_t j = 0; j < config_.hidden; ++j) {
    const double* row = &w1_[j * fan_in + p];
    for (std::size_t i = 0; i < config_.context_dim; ++i) gv[i] += row[i] * ga[j];
  }
  return gv;
}

std::vector<ContextVector> init_context_vectors(std::size_t count, std::size_t context_dim,
                                                std::uint64_t seed) {
  require(count >= 1, ErrorCode::kInvalidArgument, "init_context_vectors: count must be >= 1");
  Rng rng = make_rng({seed, stream::kContext});
  std::vector<ContextVector> out(count);
  for (std::size_t c = 0; c < count; ++c) {
    out[c].values = gaussian_vector(rng, context_dim, kContextInitStd);
    out[c].category = static_cast<int>(c);
  }
  return out;
}

}  // namespace lbp
