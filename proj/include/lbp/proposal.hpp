// Copyright 2026 The lbplab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "lbp/core_math.hpp"

namespace lbp {

struct Box {
  double x1 = 0.0, y1 = 0.0, x2 = 1.0, y2 = 1.0;

  double area() const noexcept { return (x2 - x1) * (y2 - y1); }
  bool valid() const noexcept;

  friend bool operator==(const Box&, const Box&) = default;
};

/// Ground truth the generator knows but no algorithm may read. Only
/// evaluation and tests touch this.
struct OracleInfo {
  int generative_label = -1;  // category id, or -1 for pure background clutter

  friend bool operator==(const OracleInfo&, const OracleInfo&) = default;
};

struct Proposal {
  int id = 0;
  int image = 0;
  Box box;
  double rpn_score = 0.0;
  Embedding detector_feature;  // w(x)
  Embedding clip_feature;      // I(x)
  std::optional<int> gt_label; // annotated category id, if matched
  OracleInfo oracle;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

}  // namespace lbp
