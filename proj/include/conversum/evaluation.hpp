// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "conversum/corpus.hpp"
#include "conversum/error.hpp"
#include "conversum/scoring.hpp"
#include "conversum/text.hpp"

namespace conversum {

class EvaluationError : public Error {
 public:
  enum class Kind {
    empty_text,
    encoder_failure,
    unmatched_output,
    duplicate_output,
    invalid_report,
    row_key_mismatch,
    parse_error,
  };

  EvaluationError(Kind kind, std::string detail);
  Kind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::string detail_;
};

std::string_view to_string(EvaluationError::Kind kind);

// Per-token embeddings for BERTScore.
class TokenEncoder {
 public:
  virtual ~TokenEncoder() = default;

  virtual std::string name() const = 0;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
  // One embedding per token, in order.
  virtual std::vector<EmbeddingVector> embed_tokens(std::span<const std::string> tokens) const = 0;
};

// Whitespace tokens, each embedded independently with the stub trigram
// encoder. Context-free, so identical tokens get identical vectors.
class HashedTokenEncoder final : public TokenEncoder {
 public:
  explicit HashedTokenEncoder(std::size_t dim = 16) : encoder_(dim) {}

  std::string name() const override { return "stub-token-trigram"; }
  std::vector<std::string> tokenize(std::string_view text) const override;
  std::vector<EmbeddingVector> embed_tokens(std::span<const std::string> tokens) const override;

 private:
  StubEncoder encoder_;
};

// Whitespace tokens looked up in a fixed table; unknown tokens raise
// EncoderFailure.
class LookupTokenEncoder final : public TokenEncoder {
 public:
  explicit LookupTokenEncoder(std::map<std::string, std::vector<double>> table);

  std::string name() const override { return "lookup"; }
  std::vector<std::string> tokenize(std::string_view text) const override;
  std::vector<EmbeddingVector> embed_tokens(std::span<const std::string> tokens) const override;

 private:
  std::map<std::string, std::vector<double>> table_;
};

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Greedy cosine matching without IDF weighting or baseline rescaling.
// f1 is the harmonic mean clamped to [-1, 1], and 0 when precision + recall
// is not positive.
BertScore bertscore(std::string_view prediction, std::string_view reference,
                    const TokenEncoder& encoder);

struct ReportRow {
  std::string source_lang;
  std::string target_lang;
  std::size_t sample_count = 0;
  double mean_lase = 0.0;
  double mean_bertscore = 0.0;

  bool operator==(const ReportRow&) const = default;
};

using LanguagePair = std::pair<std::string, std::string>;

// Corpus-level scores of one system, one row per language pair. Rows are
// kept sorted by (source_lang, target_lang).
class EvalReport {
 public:
  // Throws EvaluationError(invalid_report) on empty rows, zero counts,
  // out-of-range means or duplicate pairs.
  EvalReport(std::string system_name, std::vector<ReportRow> rows,
             nlohmann::json config_snapshot = nlohmann::json::object());

  const std::string& system_name() const { return system_name_; }
  const std::vector<ReportRow>& rows() const { return rows_; }
  const nlohmann::json& config_snapshot() const { return config_snapshot_; }

  const ReportRow* find(std::string_view source_lang, std::string_view target_lang) const;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);

 private:
  std::string system_name_;
  std::vector<ReportRow> rows_;
  nlohmann::json config_snapshot_;
};

struct SystemOutput {
  std::string document_id;
  std::string prediction;
};

struct EvalBackends {
  ScoringBackends scoring;
  const TokenEncoder& token_encoder;
};

struct SampleScore {
  std::string document_id;
  std::string source_lang;
  std::string target_lang;
  double lase = 0.0;
  double bertscore_f1 = 0.0;
};

// Scores each output against its test record, in output order. Throws
// UnmatchedOutput / DuplicateOutput before any scoring happens.
std::vector<SampleScore> score_outputs(std::span<const SystemOutput> outputs,
                                       std::span<const DocumentRecord> test_set,
                                       const EvalBackends& backends, std::size_t workers = 1);

// Unweighted per-pair means.
std::vector<ReportRow> aggregate_scores(std::span<const SampleScore> samples);

EvalReport evaluate_system(std::string system_name, std::span<const SystemOutput> outputs,
                           std::span<const DocumentRecord> test_set, const EvalBackends& backends,
                           std::size_t workers = 1,
                           nlohmann::json config_snapshot = nlohmann::json::object());

enum class ReportFormat { csv, markdown };

// `pair_order` lists pairs to render first, in that order; remaining rows
// follow lexicographically.
std::string emit_report(const EvalReport& report, ReportFormat format,
                        std::span<const LanguagePair> pair_order = {});

// Baseline and system side by side, joined on the language pair, with
// signed deltas in markdown. CSV output concatenates both reports.
std::string emit_report(const EvalReport& baseline, const EvalReport& system, ReportFormat format,
                        std::span<const LanguagePair> pair_order = {});

// Inverse of the CSV rendering; one report per distinct system, in order of
// first appearance.
std::vector<EvalReport> parse_report_csv(std::string_view csv);

struct DeltaRow {
  std::string source_lang;
  std::string target_lang;
  double lase_a = 0.0;
  double lase_b = 0.0;
  double bertscore_a = 0.0;
  double bertscore_b = 0.0;

  double delta_lase() const { return lase_b - lase_a; }
  double delta_bertscore() const { return bertscore_b - bertscore_a; }
};

// A delta counts as a tie when it rounds to zero at four decimals.
inline constexpr double kTieTolerance = 5e-5;

struct Tally {
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;
};

struct ReportComparison {
  std::string system_a;
  std::string system_b;
  std::vector<DeltaRow> rows;  // sorted by pair
  Tally lase;                  // from b's point of view
  Tally bertscore;
};

// Per-row (b - a). Throws RowKeyMismatch when the pair sets differ.
ReportComparison compare_reports(const EvalReport& a, const EvalReport& b);

}  // namespace conversum
