// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conversum/error.hpp"

namespace conversum {

enum class Split { train, validation, test };

std::string_view to_string(Split split);
// Accepts "train", "validation" (also "val", "dev") and "test".
std::optional<Split> parse_split(std::string_view name);
inline constexpr Split kAllSplits[] = {Split::train, Split::validation, Split::test};

// One source document with its reference summary. Language tags are stored
// in canonical registry form (see languages.hpp).
struct DocumentRecord {
  std::string id;
  std::string text;
  std::string summary;
  std::string source_lang;
  std::string target_lang;
  Split split = Split::train;

  bool operator==(const DocumentRecord&) const = default;
};

struct SplitStats {
  std::string dataset_name;
  std::size_t train_count = 0;
  std::size_t val_count = 0;
  std::size_t test_count = 0;

  std::size_t total() const { return train_count + val_count + test_count; }
  bool operator==(const SplitStats&) const = default;
};

class CorpusError : public Error {
 public:
  enum class Kind { missing_field, empty_text, unknown_language, malformed_line, io };

  CorpusError(Kind kind, std::size_t line_no, std::string detail);

  Kind kind() const { return kind_; }
  // 1-based line number; 0 when the error is not tied to a line.
  std::size_t line_no() const { return line_no_; }
  // Offending key, language tag, path or parser message depending on kind.
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::size_t line_no_;
  std::string detail_;
};

std::string_view to_string(CorpusError::Kind kind);

struct LoadOptions {
  // Throw on the first invalid record instead of logging and skipping it.
  bool strict = false;
};

struct LoadResult {
  std::vector<DocumentRecord> records;
  std::vector<CorpusError> rejected;
};

// Parses one canonical JSONL line. Throws CorpusError.
DocumentRecord parse_record(std::string_view line, std::size_t line_no, Split split);

std::string to_jsonl_line(const DocumentRecord& record);
void write_jsonl(const std::filesystem::path& path, std::span<const DocumentRecord> records);

// Streams records from a canonical JSONL file in file order. Blank lines are
// ignored. A missing or unreadable file raises CorpusError(io) on
// construction regardless of strictness.
class RecordReader {
 public:
  RecordReader(const std::filesystem::path& path, Split split, LoadOptions options = {});

  std::optional<DocumentRecord> next();

  const std::vector<CorpusError>& rejected() const { return rejected_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  Split split_;
  LoadOptions options_;
  std::size_t line_no_ = 0;
  std::vector<CorpusError> rejected_;
};

LoadResult load_dataset(const std::filesystem::path& path, Split split, LoadOptions options = {});

// A dataset exposing the three standard splits.
class DatasetSource {
 public:
  virtual ~DatasetSource() = default;
  virtual std::string name() const = 0;
  virtual LoadResult load(Split split, LoadOptions options = {}) const = 0;
};

// Canonical layout: <root>/{train,validation,test}.jsonl
class JsonlDataset final : public DatasetSource {
 public:
  JsonlDataset(std::string name, std::filesystem::path root);

  std::string name() const override { return name_; }
  LoadResult load(Split split, LoadOptions options = {}) const override;
  std::filesystem::path split_path(Split split) const;

 private:
  std::string name_;
  std::filesystem::path root_;
};

// XL-Sum release layout: <dir>/<language>_{train,val,test}.jsonl with keys
// id, url, title, summary, text. Monolingual: source == target == language.
class XlsumDataset final : public DatasetSource {
 public:
  XlsumDataset(std::filesystem::path dir, std::string language);

  std::string name() const override;
  LoadResult load(Split split, LoadOptions options = {}) const override;

 private:
  std::filesystem::path dir_;
  std::string language_;
};

// CrossSum release layout: <dir>/<source>-<target>_{train,val,test}.jsonl
// with keys text, summary and optionally source_url (used as id).
class CrossSumDataset final : public DatasetSource {
 public:
  CrossSumDataset(std::filesystem::path dir, std::string source_lang, std::string target_lang);

  std::string name() const override;
  LoadResult load(Split split, LoadOptions options = {}) const override;

 private:
  std::filesystem::path dir_;
  std::string source_lang_;
  std::string target_lang_;
};

// CNN/DailyMail exported from the Hugging Face release as JSON lines:
// <dir>/{train,validation,test}.jsonl with keys id, article, highlights.
class CnnDailyMailDataset final : public DatasetSource {
 public:
  explicit CnnDailyMailDataset(std::filesystem::path dir);

  std::string name() const override { return "CNN/DailyMail"; }
  LoadResult load(Split split, LoadOptions options = {}) const override;

 private:
  std::filesystem::path dir_;
};

SplitStats split_stats(const DatasetSource& dataset, LoadOptions options = {});

// Records whose (source_lang, target_lang) match, in input order. Tags may be
// given in canonical or ISO form; unregistered tags raise CorpusError.
std::vector<DocumentRecord> language_pair_view(std::span<const DocumentRecord> records,
                                               std::string_view source_lang,
                                               std::string_view target_lang);

// Distinct (source_lang, target_lang) pairs in order of first appearance.
std::vector<std::pair<std::string, std::string>> observed_pairs(
    std::span<const DocumentRecord> records);

}  // namespace conversum
