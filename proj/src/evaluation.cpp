// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "conversum/languages.hpp"
#include "conversum/parallel.hpp"

namespace conversum {
namespace {

constexpr std::string_view kCsvHeader = "system,source_lang,target_lang,n,lase,bertscore";

std::string pair_label(const std::string& source, const std::string& target) {
  return display_name(source) + "-" + display_name(target);
}

bool row_less(const ReportRow& a, const ReportRow& b) {
  return std::tie(a.source_lang, a.target_lang) < std::tie(b.source_lang, b.target_lang);
}

double max_cosine(const EmbeddingVector& token, std::span<const EmbeddingVector> others) {
  double best = -1.0;
  for (const auto& other : others) best = std::max(best, cosine_similarity(token, other));
  return best;
}

std::vector<EmbeddingVector> embed(std::string_view text, const TokenEncoder& encoder) {
  auto tokens = encoder.tokenize(text);
  if (tokens.empty()) throw EvaluationError(EvaluationError::Kind::empty_text, "no tokens");
  std::vector<EmbeddingVector> vectors;
  try {
    vectors = encoder.embed_tokens(tokens);
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(EvaluationError::Kind::encoder_failure, encoder.name() + ": " + e.what());
  }
  if (vectors.size() != tokens.size()) {
    throw EvaluationError(EvaluationError::Kind::encoder_failure,
                          encoder.name() + " returned a wrong number of embeddings");
  }
  return vectors;
}

// Display order: declared pairs first, then the rest in key order.
std::vector<LanguagePair> render_order(const std::vector<LanguagePair>& keys,
                                       std::span<const LanguagePair> pair_order) {
  std::set<LanguagePair> remaining(keys.begin(), keys.end());
  std::vector<LanguagePair> order;
  for (const auto& pair : pair_order) {
    if (remaining.erase(pair) > 0) order.push_back(pair);
  }
  order.insert(order.end(), remaining.begin(), remaining.end());
  return order;
}

std::vector<LanguagePair> keys_of(const EvalReport& report) {
  std::vector<LanguagePair> keys;
  for (const auto& row : report.rows()) keys.emplace_back(row.source_lang, row.target_lang);
  return keys;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) {
    throw EvaluationError(EvaluationError::Kind::parse_error,
                          "unterminated quote on line " + std::to_string(line_no));
  }
  return fields;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw EvaluationError(EvaluationError::Kind::parse_error,
                          "bad number '" + text + "' on line " + std::to_string(line_no));
  }
  return value;
}

void append_csv_rows(std::ostringstream& out, const EvalReport& report,
                     const std::vector<LanguagePair>& order) {
  for (const auto& [source, target] : order) {
    const ReportRow* row = report.find(source, target);
    if (row == nullptr) continue;
    out << csv_field(report.system_name()) << ',' << csv_field(row->source_lang) << ','
        << csv_field(row->target_lang) << ',' << row->sample_count << ','
        << format_fixed(row->mean_lase, 4) << ',' << format_fixed(row->mean_bertscore, 4) << '\n';
  }
}

void tally(Tally& t, double delta) {
  if (std::abs(delta) < kTieTolerance) {
    ++t.ties;
  } else if (delta > 0) {
    ++t.wins;
  } else {
    ++t.losses;
  }
}

}  // namespace

EvaluationError::EvaluationError(Kind kind, std::string detail)
    : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(std::move(detail)) {}

std::string_view to_string(EvaluationError::Kind kind) {
  switch (kind) {
    case EvaluationError::Kind::empty_text: return "EmptyText";
    case EvaluationError::Kind::encoder_failure: return "EncoderFailure";
    case EvaluationError::Kind::unmatched_output: return "UnmatchedOutput";
    case EvaluationError::Kind::duplicate_output: return "DuplicateOutput";
    case EvaluationError::Kind::invalid_report: return "InvalidReport";
    case EvaluationError::Kind::row_key_mismatch: return "RowKeyMismatch";
    case EvaluationError::Kind::parse_error: return "ReportParseError";
  }
  return "EvaluationError";
}

std::vector<std::string> HashedTokenEncoder::tokenize(std::string_view text) const {
  return split_whitespace(text);
}

std::vector<EmbeddingVector> HashedTokenEncoder::embed_tokens(
    std::span<const std::string> tokens) const {
  std::vector<EmbeddingVector> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) out.push_back(encode(token, encoder_));
  return out;
}

LookupTokenEncoder::LookupTokenEncoder(std::map<std::string, std::vector<double>> table)
    : table_(std::move(table)) {}

std::vector<std::string> LookupTokenEncoder::tokenize(std::string_view text) const {
  return split_whitespace(text);
}

std::vector<EmbeddingVector> LookupTokenEncoder::embed_tokens(
    std::span<const std::string> tokens) const {
  std::vector<EmbeddingVector> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    auto it = table_.find(token);
    if (it == table_.end()) {
      throw EvaluationError(EvaluationError::Kind::encoder_failure, "no embedding for '" + token + "'");
    }
    out.emplace_back(it->second);
  }
  return out;
}

BertScore bertscore(std::string_view prediction, std::string_view reference,
                    const TokenEncoder& encoder) {
  if (is_blank(prediction) || is_blank(reference)) {
    throw EvaluationError(EvaluationError::Kind::empty_text, "BERTScore needs non-empty texts");
  }
  auto pred = embed(prediction, encoder);
  auto ref = embed(reference, encoder);
  BertScore score;
  try {
    for (const auto& token : pred) score.precision += max_cosine(token, ref);
    for (const auto& token : ref) score.recall += max_cosine(token, pred);
  } catch (const ScoringError& e) {
    throw EvaluationError(EvaluationError::Kind::encoder_failure, e.what());
  }
  score.precision /= static_cast<double>(pred.size());
  score.recall /= static_cast<double>(ref.size());
  double sum = score.precision + score.recall;
  if (sum > 0.0) {
    score.f1 = std::clamp(2.0 * score.precision * score.recall / sum, -1.0, 1.0);
  }
  return score;
}

EvalReport::EvalReport(std::string system_name, std::vector<ReportRow> rows,
                       nlohmann::json config_snapshot)
    : system_name_(std::move(system_name)),
      rows_(std::move(rows)),
      config_snapshot_(std::move(config_snapshot)) {
  using Kind = EvaluationError::Kind;
  if (rows_.empty()) throw EvaluationError(Kind::invalid_report, "report has no rows");
  std::sort(rows_.begin(), rows_.end(), row_less);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    std::string key = row.source_lang + "-" + row.target_lang;
    if (row.sample_count == 0) throw EvaluationError(Kind::invalid_report, key + ": n must be >= 1");
    if (!(row.mean_lase >= 0.0 && row.mean_lase <= 1.0)) {
      throw EvaluationError(Kind::invalid_report, key + ": LaSE outside [0, 1]");
    }
    if (!(row.mean_bertscore >= -1.0 && row.mean_bertscore <= 1.0)) {
      throw EvaluationError(Kind::invalid_report, key + ": BERTScore outside [-1, 1]");
    }
    if (i > 0 && !row_less(rows_[i - 1], row)) {
      throw EvaluationError(Kind::invalid_report, key + ": duplicate language pair");
    }
  }
}

const ReportRow* EvalReport::find(std::string_view source_lang,
                                  std::string_view target_lang) const {
  for (const auto& row : rows_) {
    if (row.source_lang == source_lang && row.target_lang == target_lang) return &row;
  }
  return nullptr;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rows_) {
    rows.push_back({{"source_lang", row.source_lang},
                    {"target_lang", row.target_lang},
                    {"n", row.sample_count},
                    {"lase", row.mean_lase},
                    {"bertscore", row.mean_bertscore}});
  }
  return {{"system", system_name_}, {"rows", rows}, {"config", config_snapshot_}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  std::vector<ReportRow> rows;
  for (const auto& r : j.at("rows")) {
    rows.push_back({r.at("source_lang").get<std::string>(), r.at("target_lang").get<std::string>(),
                    r.at("n").get<std::size_t>(), r.at("lase").get<double>(),
                    r.at("bertscore").get<double>()});
  }
  return EvalReport(j.at("system").get<std::string>(), std::move(rows),
                    j.value("config", nlohmann::json::object()));
}

std::vector<SampleScore> score_outputs(std::span<const SystemOutput> outputs,
                                       std::span<const DocumentRecord> test_set,
                                       const EvalBackends& backends, std::size_t workers) {
  std::unordered_map<std::string_view, const DocumentRecord*> by_id;
  for (const auto& record : test_set) by_id.emplace(record.id, &record);

  std::vector<const DocumentRecord*> matched;
  std::unordered_set<std::string_view> seen;
  for (const auto& output : outputs) {
    auto it = by_id.find(output.document_id);
    if (it == by_id.end()) {
      throw EvaluationError(EvaluationError::Kind::unmatched_output, output.document_id);
    }
    if (!seen.insert(output.document_id).second) {
      throw EvaluationError(EvaluationError::Kind::duplicate_output, output.document_id);
    }
    matched.push_back(it->second);
  }

  EncoderDispatch serialized(backends.scoring.encoder);
  const Encoder& encoder =
      backends.scoring.encoder.thread_safe() ? backends.scoring.encoder : serialized;
  ScoringBackends scoring{encoder, backends.scoring.lang_id, backends.scoring.tokenizer};

  std::vector<SampleScore> scores(outputs.size());
  parallel_for(outputs.size(), workers, [&](std::size_t i) {
    const DocumentRecord& record = *matched[i];
    SampleScore& s = scores[i];
    s.document_id = record.id;
    s.source_lang = record.source_lang;
    s.target_lang = record.target_lang;
    s.lase = lase(outputs[i].prediction, record.summary, record.target_lang, scoring).value;
    s.bertscore_f1 = bertscore(outputs[i].prediction, record.summary, backends.token_encoder).f1;
  });
  return scores;
}

std::vector<ReportRow> aggregate_scores(std::span<const SampleScore> samples) {
  // Sum in document-id order so the means do not depend on stream order.
  std::vector<const SampleScore*> sorted;
  for (const auto& s : samples) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const SampleScore* a, const SampleScore* b) { return a->document_id < b->document_id; });

  std::map<LanguagePair, ReportRow> rows;
  for (const SampleScore* s : sorted) {
    auto& row = rows[{s->source_lang, s->target_lang}];
    row.source_lang = s->source_lang;
    row.target_lang = s->target_lang;
    ++row.sample_count;
    row.mean_lase += s->lase;
    row.mean_bertscore += s->bertscore_f1;
  }
  std::vector<ReportRow> out;
  for (auto& [key, row] : rows) {
    row.mean_lase /= static_cast<double>(row.sample_count);
    row.mean_bertscore /= static_cast<double>(row.sample_count);
    out.push_back(row);
  }
  return out;
}

EvalReport evaluate_system(std::string system_name, std::span<const SystemOutput> outputs,
                           std::span<const DocumentRecord> test_set, const EvalBackends& backends,
                           std::size_t workers, nlohmann::json config_snapshot) {
  auto samples = score_outputs(outputs, test_set, backends, workers);
  return EvalReport(std::move(system_name), aggregate_scores(samples), std::move(config_snapshot));
}

std::string emit_report(const EvalReport& report, ReportFormat format,
                        std::span<const LanguagePair> pair_order) {
  auto order = render_order(keys_of(report), pair_order);
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kCsvHeader << '\n';
    append_csv_rows(out, report, order);
    return out.str();
  }
  const auto& name = report.system_name();
  out << "| Source-Target | n | " << name << " LaSE | " << name << " BERTScore |\n";
  out << "|---|---:|---:|---:|\n";
  for (const auto& [source, target] : order) {
    const ReportRow& row = *report.find(source, target);
    out << "| " << pair_label(source, target) << " | " << row.sample_count << " | "
        << format_fixed(row.mean_lase, 4) << " | " << format_fixed(row.mean_bertscore, 4)
        << " |\n";
  }
  return out.str();
}

std::string emit_report(const EvalReport& baseline, const EvalReport& system, ReportFormat format,
                        std::span<const LanguagePair> pair_order) {
  auto comparison = compare_reports(baseline, system);
  auto order = render_order(keys_of(baseline), pair_order);
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kCsvHeader << '\n';
    append_csv_rows(out, baseline, order);
    append_csv_rows(out, system, order);
    return out.str();
  }
  const auto& a = baseline.system_name();
  const auto& b = system.system_name();
  out << "| Source-Target | " << a << " LaSE | " << a << " BERTScore | " << b << " LaSE | " << b
      << " BERTScore | ΔLaSE | ΔBERTScore |\n";
  out << "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& [source, target] : order) {
    auto it = std::find_if(comparison.rows.begin(), comparison.rows.end(), [&](const DeltaRow& r) {
      return r.source_lang == source && r.target_lang == target;
    });
    out << "| " << pair_label(source, target) << " | " << format_fixed(it->lase_a, 4) << " | "
        << format_fixed(it->bertscore_a, 4) << " | " << format_fixed(it->lase_b, 4) << " | "
        << format_fixed(it->bertscore_b, 4) << " | " << format_signed(it->delta_lase(), 4) << " | "
        << format_signed(it->delta_bertscore(), 4) << " |\n";
  }
  return out.str();
}

std::vector<EvalReport> parse_report_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw EvaluationError(EvaluationError::Kind::parse_error, "missing CSV header");
  }
  ++line_no;
  std::vector<std::string> systems;
  std::map<std::string, std::vector<ReportRow>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != 6) {
      throw EvaluationError(EvaluationError::Kind::parse_error,
                            "expected 6 fields on line " + std::to_string(line_no));
    }
    if (!rows.contains(fields[0])) systems.push_back(fields[0]);
    rows[fields[0]].push_back({fields[1], fields[2], parse_number<std::size_t>(fields[3], line_no),
                               parse_number<double>(fields[4], line_no),
                               parse_number<double>(fields[5], line_no)});
  }
  std::vector<EvalReport> reports;
  for (const auto& name : systems) reports.emplace_back(name, std::move(rows[name]));
  return reports;
}

ReportComparison compare_reports(const EvalReport& a, const EvalReport& b) {
  if (keys_of(a) != keys_of(b)) {
    throw EvaluationError(EvaluationError::Kind::row_key_mismatch,
                          a.system_name() + " and " + b.system_name() + " cover different pairs");
  }
  ReportComparison comparison;
  comparison.system_a = a.system_name();
  comparison.system_b = b.system_name();
  for (std::size_t i = 0; i < a.rows().size(); ++i) {
    const auto& ra = a.rows()[i];
    const auto& rb = b.rows()[i];
    DeltaRow row{ra.source_lang, ra.target_lang, ra.mean_lase, rb.mean_lase, ra.mean_bertscore,
                 rb.mean_bertscore};
    tally(comparison.lase, row.delta_lase());
    tally(comparison.bertscore, row.delta_bertscore());
    comparison.rows.push_back(std::move(row));
  }
  return comparison;
}

}  // namespace conversum
