// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/contrastive.hpp"

#include <algorithm>
#include <cmath>

namespace conversum {
namespace {

void check_indices(const ContrastivePairBatch& batch) {
  const std::size_t n = batch.scores.size();
  for (const auto& pair : batch.pairs) {
    if (pair.positive_index >= n || pair.negative_index >= n) {
      throw ContrastiveError(ContrastiveError::Kind::index_out_of_range,
                             "pair (" + std::to_string(pair.positive_index) + ", " +
                                 std::to_string(pair.negative_index) + ") with " +
                                 std::to_string(n) + " scores");
    }
  }
}

double hinge_argument(const ContrastivePairBatch& batch, const PairSpec& pair) {
  return pair.margin - batch.scores[pair.positive_index] + batch.scores[pair.negative_index];
}

}  // namespace

ContrastiveError::ContrastiveError(Kind kind, std::string detail)
    : Error((kind == Kind::index_out_of_range ? "IndexOutOfRange: " : "InvalidLossConfig: ") +
            detail),
      kind_(kind) {}

void LossConfig::validate() const {
  if (!std::isfinite(base_margin) || base_margin < 0.0) {
    throw ContrastiveError(ContrastiveError::Kind::invalid_config,
                           "base_margin must be a non-negative finite number");
  }
}

nlohmann::json LossConfig::to_json() const {
  return {{"base_margin", base_margin}, {"rank_scaled", rank_scaled}};
}

LossConfig LossConfig::from_json(const nlohmann::json& j) {
  LossConfig config;
  config.base_margin = j.value("base_margin", config.base_margin);
  config.rank_scaled = j.value("rank_scaled", config.rank_scaled);
  return config;
}

std::vector<PairSpec> build_pairs(std::size_t n, const LossConfig& config) {
  config.validate();
  std::vector<PairSpec> pairs;
  if (n < 2) return pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double margin = config.rank_scaled ? config.base_margin * static_cast<double>(j - i)
                                         : config.base_margin;
      pairs.push_back({i, j, margin});
    }
  }
  return pairs;
}

double ranking_loss(const ContrastivePairBatch& batch) {
  check_indices(batch);
  double loss = 0.0;
  for (const auto& pair : batch.pairs) loss += std::max(0.0, hinge_argument(batch, pair));
  return loss;
}

std::vector<double> loss_subgradient(const ContrastivePairBatch& batch) {
  check_indices(batch);
  std::vector<double> grad(batch.scores.size(), 0.0);
  for (const auto& pair : batch.pairs) {
    if (hinge_argument(batch, pair) > 0.0) {
      grad[pair.positive_index] -= 1.0;
      grad[pair.negative_index] += 1.0;
    }
  }
  return grad;
}

}  // namespace conversum
