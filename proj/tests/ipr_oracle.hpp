// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

// Term-by-term rectified-probability reference over an inference vocabulary.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lbp/vocabulary.hpp"
#include "oracles.hpp"

namespace oracle {

inline LD score(const lbp::Embedding& a, const lbp::Embedding& b, double tau) {
  return std::exp(cosine(a.values(), b.values()) / LD(tau));
}

struct IprOracle {
  LD bu = 0, o = 0, bg = 0, o_tilde = 0;
  std::vector<LD> factors;
  std::vector<LD> unrectified, rectified;
};

inline IprOracle ipr_oracle(const lbp::Embedding& w, const lbp::Vocabulary& v, double tau) {
  IprOracle r;
  const lbp::Block fg{v.base_block().begin, v.novel_block().end};
  const lbp::Block u = v.underlying_block();
  const lbp::Block nv = v.novel_block();
  for (std::size_t i = fg.begin; i < fg.end; ++i) r.bu += score(w, v.embedding(i), tau);
  for (std::size_t i = u.begin; i < u.end; ++i) r.o += score(w, v.embedding(i), tau);
  r.bg = score(w, v.embedding(v.sub_background_index()), tau);
  for (std::size_t c = u.begin; c < u.end; ++c) {
    LD all = 0, outside = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j == c) continue;
      const LD s = score(v.embedding(c), v.embedding(j), tau);
      all += s;
      if (!nv.contains(j)) outside += s;
    }
    r.factors.push_back(outside / all);
    r.o_tilde += score(w, v.embedding(c), tau) * r.factors.back();
  }
  for (std::size_t i = fg.begin; i < fg.end; ++i) {
    const LD s = score(w, v.embedding(i), tau);
    r.unrectified.push_back(s / (r.bu + r.o + r.bg));
    r.rectified.push_back(s / (r.bu + r.o_tilde + r.bg));
  }
  return r;
}

}  // namespace oracle
