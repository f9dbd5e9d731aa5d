// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/corpus.hpp"

#include <functional>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "conversum/languages.hpp"
#include "conversum/text.hpp"

namespace conversum {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

using RowMapper = std::function<DocumentRecord(const json&, std::size_t line_no)>;

json parse_object(std::string_view line, std::size_t line_no) {
  json object;
  try {
    object = json::parse(line);
  } catch (const json::parse_error& e) {
    throw CorpusError(CorpusError::Kind::malformed_line, line_no, e.what());
  }
  if (!object.is_object()) {
    throw CorpusError(CorpusError::Kind::malformed_line, line_no, "line is not a JSON object");
  }
  return object;
}

std::string require_string(const json& object, const char* key, std::size_t line_no) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) {
    throw CorpusError(CorpusError::Kind::missing_field, line_no, key);
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw CorpusError(CorpusError::Kind::malformed_line, line_no,
                    std::string("field '") + key + "' is not a string");
}

std::string require_language(const std::string& tag, std::size_t line_no) {
  auto canonical = canonical_language(tag);
  if (!canonical) throw CorpusError(CorpusError::Kind::unknown_language, line_no, tag);
  return *canonical;
}

void check_texts(const DocumentRecord& record, std::size_t line_no) {
  if (is_blank(record.text)) throw CorpusError(CorpusError::Kind::empty_text, line_no, "text");
  if (is_blank(record.summary)) {
    throw CorpusError(CorpusError::Kind::empty_text, line_no, "summary");
  }
}

LoadResult load_with(const fs::path& path, Split split, LoadOptions options,
                     const RowMapper& mapper) {
  std::ifstream in(path);
  if (!in) {
    throw CorpusError(CorpusError::Kind::io, 0, "cannot open " + path.string());
  }
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      DocumentRecord record = mapper(parse_object(line, line_no), line_no);
      record.split = split;
      check_texts(record, line_no);
      result.records.push_back(std::move(record));
    } catch (const CorpusError& e) {
      if (options.strict) throw;
      spdlog::warn("{}:{}: skipping record ({})", path.string(), line_no, e.what());
      result.rejected.push_back(e);
    }
  }
  return result;
}

std::string_view native_split_suffix(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "val";
    case Split::test: return "test";
  }
  return "train";
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "validation" || name == "val" || name == "dev") return Split::validation;
  if (name == "test") return Split::test;
  return std::nullopt;
}

CorpusError::CorpusError(Kind kind, std::size_t line_no, std::string detail)
    : Error(std::string(conversum::to_string(kind)) +
            (line_no > 0 ? " at line " + std::to_string(line_no) : std::string()) + ": " +
            detail),
      kind_(kind),
      line_no_(line_no),
      detail_(std::move(detail)) {}

std::string_view to_string(CorpusError::Kind kind) {
  switch (kind) {
    case CorpusError::Kind::missing_field: return "MissingField";
    case CorpusError::Kind::empty_text: return "EmptyText";
    case CorpusError::Kind::unknown_language: return "UnknownLanguage";
    case CorpusError::Kind::malformed_line: return "MalformedLine";
    case CorpusError::Kind::io: return "IoError";
  }
  return "CorpusError";
}

DocumentRecord parse_record(std::string_view line, std::size_t line_no, Split split) {
  json object = parse_object(line, line_no);
  DocumentRecord record;
  record.id = require_string(object, "id", line_no);
  record.text = require_string(object, "text", line_no);
  record.summary = require_string(object, "summary", line_no);
  std::string source = require_string(object, "source_lang", line_no);
  std::string target = require_string(object, "target_lang", line_no);
  check_texts(record, line_no);
  record.source_lang = require_language(source, line_no);
  record.target_lang = require_language(target, line_no);
  record.split = split;
  return record;
}

std::string to_jsonl_line(const DocumentRecord& record) {
  json object = {{"id", record.id},
                 {"text", record.text},
                 {"summary", record.summary},
                 {"source_lang", record.source_lang},
                 {"target_lang", record.target_lang}};
  return object.dump();
}

void write_jsonl(const fs::path& path, std::span<const DocumentRecord> records) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError(CorpusError::Kind::io, 0, "cannot write " + path.string());
  for (const auto& record : records) out << to_jsonl_line(record) << '\n';
}

RecordReader::RecordReader(const fs::path& path, Split split, LoadOptions options)
    : path_(path), in_(path), split_(split), options_(options) {
  if (!in_) throw CorpusError(CorpusError::Kind::io, 0, "cannot open " + path.string());
}

std::optional<DocumentRecord> RecordReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (is_blank(line)) continue;
    try {
      return parse_record(line, line_no_, split_);
    } catch (const CorpusError& e) {
      if (options_.strict) throw;
      spdlog::warn("{}:{}: skipping record ({})", path_.string(), line_no_, e.what());
      rejected_.push_back(e);
    }
  }
  return std::nullopt;
}

LoadResult load_dataset(const fs::path& path, Split split, LoadOptions options) {
  RecordReader reader(path, split, options);
  LoadResult result;
  while (auto record = reader.next()) result.records.push_back(std::move(*record));
  result.rejected = reader.rejected();
  return result;
}

JsonlDataset::JsonlDataset(std::string name, fs::path root)
    : name_(std::move(name)), root_(std::move(root)) {}

fs::path JsonlDataset::split_path(Split split) const {
  return root_ / (std::string(to_string(split)) + ".jsonl");
}

LoadResult JsonlDataset::load(Split split, LoadOptions options) const {
  return load_dataset(split_path(split), split, options);
}

XlsumDataset::XlsumDataset(fs::path dir, std::string language)
    : dir_(std::move(dir)), language_(std::move(language)) {}

std::string XlsumDataset::name() const { return "XLSUM-" + display_name(language_); }

LoadResult XlsumDataset::load(Split split, LoadOptions options) const {
  auto path = dir_ / (language_ + "_" + std::string(native_split_suffix(split)) + ".jsonl");
  return load_with(path, split, options, [this](const json& row, std::size_t line_no) {
    DocumentRecord record;
    record.id = require_string(row, "id", line_no);
    record.text = require_string(row, "text", line_no);
    record.summary = require_string(row, "summary", line_no);
    record.source_lang = require_language(language_, line_no);
    record.target_lang = record.source_lang;
    return record;
  });
}

CrossSumDataset::CrossSumDataset(fs::path dir, std::string source_lang, std::string target_lang)
    : dir_(std::move(dir)),
      source_lang_(std::move(source_lang)),
      target_lang_(std::move(target_lang)) {}

std::string CrossSumDataset::name() const {
  return "CrossSum-" + display_name(source_lang_) + "-" + display_name(target_lang_);
}

LoadResult CrossSumDataset::load(Split split, LoadOptions options) const {
  std::string stem = source_lang_ + "-" + target_lang_ + "_" +
                     std::string(native_split_suffix(split));
  auto path = dir_ / (stem + ".jsonl");
  return load_with(path, split, options, [this, stem](const json& row, std::size_t line_no) {
    DocumentRecord record;
    if (row.contains("source_url") && row["source_url"].is_string()) {
      record.id = row["source_url"].get<std::string>();
    } else if (row.contains("id")) {
      record.id = require_string(row, "id", line_no);
    } else {
      record.id = stem + "-" + std::to_string(line_no);
    }
    record.text = require_string(row, "text", line_no);
    record.summary = require_string(row, "summary", line_no);
    record.source_lang = require_language(source_lang_, line_no);
    record.target_lang = require_language(target_lang_, line_no);
    return record;
  });
}

CnnDailyMailDataset::CnnDailyMailDataset(fs::path dir) : dir_(std::move(dir)) {}

LoadResult CnnDailyMailDataset::load(Split split, LoadOptions options) const {
  auto path = dir_ / (std::string(to_string(split)) + ".jsonl");
  return load_with(path, split, options, [](const json& row, std::size_t line_no) {
    DocumentRecord record;
    record.id = require_string(row, "id", line_no);
    record.text = require_string(row, "article", line_no);
    record.summary = require_string(row, "highlights", line_no);
    record.source_lang = "english";
    record.target_lang = "english";
    return record;
  });
}

SplitStats split_stats(const DatasetSource& dataset, LoadOptions options) {
  SplitStats stats;
  stats.dataset_name = dataset.name();
  stats.train_count = dataset.load(Split::train, options).records.size();
  stats.val_count = dataset.load(Split::validation, options).records.size();
  stats.test_count = dataset.load(Split::test, options).records.size();
  return stats;
}

std::vector<DocumentRecord> language_pair_view(std::span<const DocumentRecord> records,
                                               std::string_view source_lang,
                                               std::string_view target_lang) {
  auto source = canonical_language(source_lang);
  if (!source) throw CorpusError(CorpusError::Kind::unknown_language, 0, std::string(source_lang));
  auto target = canonical_language(target_lang);
  if (!target) throw CorpusError(CorpusError::Kind::unknown_language, 0, std::string(target_lang));
  std::vector<DocumentRecord> view;
  for (const auto& record : records) {
    if (record.source_lang == *source && record.target_lang == *target) view.push_back(record);
  }
  return view;
}

std::vector<std::pair<std::string, std::string>> observed_pairs(
    std::span<const DocumentRecord> records) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& record : records) {
    auto key = std::make_pair(record.source_lang, record.target_lang);
    if (seen.insert(key).second) pairs.push_back(std::move(key));
  }
  return pairs;
}

}  // namespace conversum
