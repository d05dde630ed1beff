// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace lbp {

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream...) so no two components share state.
inline Rng make_rng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  for (std::uint64_t k : keys) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

inline std::vector<double> gaussian_vector(Rng& rng, std::size_t n, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

/// Stream tags keep seeds of different subsystems apart.
namespace stream {
inline constexpr std::uint64_t kEncoder = 0x656e63;
inline constexpr std::uint64_t kNameToken = 0x6e616d;
inline constexpr std::uint64_t kContext = 0x637478;
inline constexpr std::uint64_t kScenario = 0x73636e;
inline constexpr std::uint64_t kKmeans = 0x6b6d6e;
inline constexpr std::uint64_t kTrain = 0x74726e;
inline constexpr std::uint64_t kSubBackground = 0x736267;
inline constexpr std::uint64_t kGradcheck = 0x67636b;
}  // namespace stream

/// 64-bit FNV-1a, used for config fingerprints in file headers.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace lbp
