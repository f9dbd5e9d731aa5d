// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conversum/error.hpp"

namespace conversum {

// An ordered (better, worse) pair of rank positions with its hinge margin.
struct PairSpec {
  std::size_t positive_index = 0;
  std::size_t negative_index = 0;
  double margin = 0.0;

  bool operator==(const PairSpec&) const = default;
};

struct LossConfig {
  double base_margin = 0.01;
  // Scale each pair's margin by its rank distance (j - i).
  bool rank_scaled = true;

  void validate() const;
  nlohmann::json to_json() const;
  static LossConfig from_json(const nlohmann::json& j);
};

// Scores of one document's candidates in LaSE-rank order plus the pairs the
// loss runs over.
struct ContrastivePairBatch {
  std::vector<double> scores;
  std::vector<PairSpec> pairs;
};

class ContrastiveError : public Error {
 public:
  enum class Kind { index_out_of_range, invalid_config };

  ContrastiveError(Kind kind, std::string detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// All n(n-1)/2 pairs (i, j), i < j, over rank positions.
std::vector<PairSpec> build_pairs(std::size_t n, const LossConfig& config);

// Sum over pairs of max(0, margin - scores[pos] + scores[neg]).
double ranking_loss(const ContrastivePairBatch& batch);

// d(loss)/d(scores): each pair with a strictly positive hinge argument adds
// -1 at its positive index and +1 at its negative index.
std::vector<double> loss_subgradient(const ContrastivePairBatch& batch);

}  // namespace conversum
