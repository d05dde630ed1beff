// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations for the test suites. Everything here
// works on plain vectors in long double with direct loops and shares no code
// with the library's math.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "lbp/core_math.hpp"
#include "lbp/proposal.hpp"
#include "lbp/vocabulary.hpp"

namespace oracle {

using Vec = std::vector<double>;
using LD = long double;

inline Vec vec(const lbp::Embedding& e) { return e.values(); }

inline LD dot(const Vec& a, const Vec& b) {
  LD s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += LD(a[i]) * LD(b[i]);
  return s;
}

inline LD cosine(const Vec& a, const Vec& b) {
  return dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b)));
}

/// exp(cos/tau) for every row, then divide by the plain sum.
inline std::vector<LD> softmax(const Vec& w, const std::vector<Vec>& rows, double tau) {
  std::vector<LD> s;
  LD total = 0;
  for (const Vec& r : rows) {
    s.push_back(std::exp(cosine(w, r) / LD(tau)));
    total += s.back();
  }
  for (LD& x : s) x /= total;
  return s;
}

inline std::vector<Vec> rows_of(const lbp::Vocabulary& v) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(v.embedding(i).values());
  return out;
}

inline LD set_mass(const std::vector<LD>& p, const std::vector<std::size_t>& idx) {
  LD s = 0;
  for (std::size_t i : idx) s += p[i];
  return s;
}

inline std::vector<std::size_t> range(std::size_t a, std::size_t b) {
  std::vector<std::size_t> out;
  for (std::size_t i = a; i < b; ++i) out.push_back(i);
  return out;
}

inline LD iou(const lbp::Box& a, const lbp::Box& b) {
  const LD ix = std::max<LD>(0, std::min<LD>(a.x2, b.x2) - std::max<LD>(a.x1, b.x1));
  const LD iy = std::max<LD>(0, std::min<LD>(a.y2, b.y2) - std::max<LD>(a.y1, b.y1));
  const LD inter = ix * iy;
  const LD uni = LD(a.x2 - a.x1) * (a.y2 - a.y1) + LD(b.x2 - b.x1) * (b.y2 - b.y1) - inter;
  return uni > 0 ? inter / uni : 0;
}

/// Exhaustive suppression: a box survives iff no surviving box that outranks
/// it overlaps it at or above the threshold. Rank = (score desc, index asc).
/// Solved by Jacobi passes over all pairs until the survivor set is stable.
inline std::vector<std::size_t> nms(const std::vector<lbp::Box>& boxes, const std::vector<double>& scores,
                                    double thr) {
  const std::size_t n = boxes.size();
  auto outranks = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::vector<int> alive(n, 1);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> next(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && alive[j] && outranks(j, i) && oracle::iou(boxes[j], boxes[i]) >= thr) next[i] = 0;
      }
    }
    if (next != alive) {
      alive = next;
      changed = true;
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) kept.push_back(i);
  }
  return kept;
}

inline LD silhouette(const std::vector<Vec>& pts, const std::vector<std::size_t>& lab, std::size_t k) {
  const std::size_t n = pts.size();
  auto dist = [&](std::size_t a, std::size_t b) {
    LD s = 0;
    for (std::size_t i = 0; i < pts[a].size(); ++i) {
      const LD d = LD(pts[a][i]) - pts[b][i];
      s += d * d;
    }
    return std::sqrt(s);
  };
  LD total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<LD> sum(k, 0);
    std::vector<std::size_t> cnt(k, 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[lab[j]] += dist(i, j);
      cnt[lab[j]] += 1;
    }
    if (cnt[lab[i]] == 0) continue;
    const LD a = sum[lab[i]] / cnt[lab[i]];
    LD b = INFINITY;
    for (std::size_t c = 0; c < k; ++c) {
      if (c != lab[i] && cnt[c] > 0) b = std::min(b, sum[c] / cnt[c]);
    }
    if (!std::isfinite(static_cast<double>(b))) continue;
    total += (b - a) / std::max(a, b);
  }
  return total / n;
}

inline lbp::Embedding random_unit(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(d);
  for (double& x : v) x = g(rng);
  return lbp::Embedding::normalized(v);
}

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace oracle
