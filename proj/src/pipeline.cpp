// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "conversum/languages.hpp"
#include "conversum/parallel.hpp"

#ifndef CONVERSUM_VERSION
#define CONVERSUM_VERSION "0.1.0-unknown"
#endif

namespace conversum {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    throw PipelineError(PipelineError::Kind::invalid_config, std::string(where) + " must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw PipelineError(PipelineError::Kind::invalid_config,
                          "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

void write_text(const fs::path& path, std::string_view body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out) throw Error("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& body) { write_text(path, body.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw PipelineError(PipelineError::Kind::missing_upstream_artifact, "cannot read " + path.string(),
                        path);
  }
  return json::parse(in);
}

void require_artifact(const fs::path& path, std::string_view producer) {
  if (!fs::exists(path)) {
    throw PipelineError(PipelineError::Kind::missing_upstream_artifact,
                        path.string() + " not found; run '" + std::string(producer) + "' first", path);
  }
}

// Parts of the configuration that determine artifact contents. Paths and
// worker counts are left out so that runs in different directories produce
// identical bytes.
json experiment_snapshot(const PipelineConfig& config) {
  json j = config.to_json();
  j.erase("output_dir");
  j.erase("cache_dir");
  j.erase("workers");
  j["dataset"].erase("path");
  j.erase("llm");
  return j;
}

CandidateSet cached_candidates(const CandidateCache& cache, const DocumentRecord& record,
                               const std::string& fingerprint) {
  auto set = cache.load(record.id, fingerprint);
  if (!set) {
    auto path = cache.path_for(record.id, fingerprint);
    throw PipelineError(PipelineError::Kind::missing_upstream_artifact,
                        path.string() + " not found; run 'generate' first", path);
  }
  return *set;
}

const Encoder& shareable(const Encoder& encoder, std::unique_ptr<EncoderDispatch>& holder) {
  if (encoder.thread_safe()) return encoder;
  holder = std::make_unique<EncoderDispatch>(encoder);
  return *holder;
}

// Candidates of one scored dump, grouped by document in rank order.
std::map<std::string, std::vector<json>> read_score_dump(const fs::path& path) {
  require_artifact(path, "score");
  std::ifstream in(path, std::ios::binary);
  std::map<std::string, std::vector<json>> grouped;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    json j = json::parse(line);
    grouped[j.at("document_id").get<std::string>()].push_back(std::move(j));
  }
  for (auto& [id, rows] : grouped) {
    std::stable_sort(rows.begin(), rows.end(), [](const json& a, const json& b) {
      return a.at("rank").get<std::size_t>() < b.at("rank").get<std::size_t>();
    });
  }
  return grouped;
}

std::vector<TrainingExample> load_examples(const PipelineConfig& config, Split split,
                                           const Encoder& encoder) {
  auto dump = read_score_dump(score_dump_path(config, split));
  std::vector<TrainingExample> examples;
  for (const auto& record : load_split(config, split)) {
    auto it = dump.find(record.id);
    if (it == dump.end()) continue;
    TrainingExample example;
    example.document_id = record.id;
    example.document = encode(record.text, encoder);
    example.reference = encode(record.summary, encoder);
    for (const auto& row : it->second) {
      example.candidates.push_back(encode(row.at("candidate_text").get<std::string>(), encoder));
      example.lase_values.push_back(row.at("lase").at("value").get<double>());
    }
    examples.push_back(std::move(example));
  }
  return examples;
}

void write_outputs(const fs::path& path, std::span<const SystemOutput> outputs) {
  std::string body;
  for (const auto& output : outputs) {
    body += json{{"document_id", output.document_id}, {"prediction", output.prediction}}.dump() + "\n";
  }
  write_text(path, body);
}

void write_report_files(const fs::path& dir, const std::string& stem, const EvalReport& report) {
  write_json(dir / (stem + ".json"), report.to_json());
  write_text(dir / (stem + ".csv"), emit_report(report, ReportFormat::csv));
  write_text(dir / (stem + ".md"), emit_report(report, ReportFormat::markdown));
}

std::optional<EvalReport> restrict_to(const EvalReport& report, const std::set<LanguagePair>& keys) {
  std::vector<ReportRow> rows;
  for (const auto& row : report.rows()) {
    if (keys.contains({row.source_lang, row.target_lang})) rows.push_back(row);
  }
  if (rows.empty()) return std::nullopt;
  return EvalReport(report.system_name(), std::move(rows), report.config_snapshot());
}

std::string file_stem(std::string_view name) {
  std::string out;
  for (char c : name) {
    bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out;
}

}  // namespace

PipelineError::PipelineError(Kind kind, std::string detail, fs::path path)
    : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind), path_(std::move(path)) {}

std::string_view to_string(PipelineError::Kind kind) {
  switch (kind) {
    case PipelineError::Kind::missing_upstream_artifact: return "MissingUpstreamArtifact";
    case PipelineError::Kind::invalid_config: return "InvalidConfig";
    case PipelineError::Kind::unreadable_dataset: return "UnreadableDataset";
  }
  return "PipelineError";
}

void PipelineConfig::finalize() {
  generation.seed = seed;
  train.seed = seed;
  train.loss = loss;
  if (cache_dir.empty()) cache_dir = output_dir / "cache";
}

void PipelineConfig::validate() const {
  using Kind = PipelineError::Kind;
  try {
    generation.validate();
    loss.validate();
    train.validate();
    llm.retry.validate();
  } catch (const Error& e) {
    throw PipelineError(Kind::invalid_config, e.what());
  }
  static const std::set<std::string> formats = {"jsonl", "xlsum", "crosssum", "cnndm"};
  if (!formats.contains(dataset.format)) {
    throw PipelineError(Kind::invalid_config, "unknown dataset format '" + dataset.format + "'");
  }
  if (dataset.path.empty()) throw PipelineError(Kind::invalid_config, "dataset.path is required");
  if (dataset.format == "xlsum" && !is_registered_language(dataset.language)) {
    throw PipelineError(Kind::invalid_config, "xlsum needs a registered dataset.language");
  }
  if (dataset.format == "crosssum" &&
      !(is_registered_language(dataset.source_lang) && is_registered_language(dataset.target_lang))) {
    throw PipelineError(Kind::invalid_config, "crosssum needs dataset.source_lang/target_lang");
  }
  if (dataset.splits.empty()) throw PipelineError(Kind::invalid_config, "no splits requested");
  if (workers == 0) throw PipelineError(Kind::invalid_config, "workers must be >= 1");
  if (backends.encoder_dim == 0) throw PipelineError(Kind::invalid_config, "encoder_dim must be > 0");
  if (llm.provider != "openai" && llm.provider != "stub") {
    throw PipelineError(Kind::invalid_config, "unknown llm.provider '" + llm.provider + "'");
  }
  for (const auto& [source, target] : llm.pairs) {
    if (!is_registered_language(source) || !is_registered_language(target)) {
      throw PipelineError(Kind::invalid_config, "unknown language pair " + source + "-" + target);
    }
  }
}

json PipelineConfig::to_json() const {
  json splits = json::array();
  for (Split s : dataset.splits) splits.push_back(std::string(to_string(s)));
  json pairs = json::array();
  for (const auto& [source, target] : llm.pairs) pairs.push_back({source, target});
  return {
      {"dataset",
       {{"format", dataset.format},
        {"path", dataset.path.generic_string()},
        {"name", dataset.name},
        {"language", dataset.language},
        {"source_lang", dataset.source_lang},
        {"target_lang", dataset.target_lang},
        {"splits", splits}}},
      {"generation", generation.to_json()},
      {"loss", loss.to_json()},
      {"train", train.to_json()},
      {"backends",
       {{"encoder", backends.encoder},
        {"encoder_dim", backends.encoder_dim},
        {"generator", backends.generator},
        {"lang_id", backends.lang_id},
        {"token_encoder", backends.token_encoder}}},
      {"llm",
       {{"provider", llm.provider},
        {"openai", llm.openai.to_json()},
        {"retry", llm.retry.to_json()},
        {"mode", std::string(to_string(llm.mode))},
        {"pairs", pairs},
        {"system_name", llm.system_name},
        {"split", std::string(to_string(llm.split))},
        {"survey_repeats", llm.survey_repeats}}},
      {"output_dir", output_dir.generic_string()},
      {"cache_dir", cache_dir.generic_string()},
      {"seed", seed},
      {"workers", workers},
      {"strict", strict},
  };
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  using Kind = PipelineError::Kind;
  check_keys(j, "config", {"dataset", "generation", "loss", "train", "backends", "llm", "output_dir",
                           "cache_dir", "seed", "workers", "strict"});
  PipelineConfig c;
  try {
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      check_keys(d, "dataset",
                 {"format", "path", "name", "language", "source_lang", "target_lang", "splits"});
      c.dataset.format = d.value("format", c.dataset.format);
      c.dataset.path = d.value("path", std::string());
      c.dataset.name = d.value("name", c.dataset.name);
      c.dataset.language = d.value("language", c.dataset.language);
      c.dataset.source_lang = d.value("source_lang", c.dataset.source_lang);
      c.dataset.target_lang = d.value("target_lang", c.dataset.target_lang);
      if (d.contains("splits")) {
        c.dataset.splits.clear();
        for (const auto& s : d["splits"]) {
          auto split = parse_split(s.get<std::string>());
          if (!split) throw PipelineError(Kind::invalid_config, "unknown split " + s.dump());
          c.dataset.splits.push_back(*split);
        }
      }
    }
    if (j.contains("generation")) c.generation = GenerationConfig::from_json(j["generation"]);
    if (j.contains("loss")) c.loss = LossConfig::from_json(j["loss"]);
    if (j.contains("train")) c.train = TrainConfig::from_json(j["train"]);
    if (j.contains("backends")) {
      const auto& b = j["backends"];
      check_keys(b, "backends", {"encoder", "encoder_dim", "generator", "lang_id", "token_encoder"});
      c.backends.encoder = b.value("encoder", c.backends.encoder);
      c.backends.encoder_dim = b.value("encoder_dim", c.backends.encoder_dim);
      c.backends.generator = b.value("generator", c.backends.generator);
      c.backends.lang_id = b.value("lang_id", c.backends.lang_id);
      c.backends.token_encoder = b.value("token_encoder", c.backends.token_encoder);
    }
    if (j.contains("llm")) {
      const auto& l = j["llm"];
      check_keys(l, "llm",
                 {"provider", "openai", "retry", "mode", "pairs", "system_name", "split", "survey_repeats"});
      c.llm.provider = l.value("provider", c.llm.provider);
      if (l.contains("openai")) c.llm.openai = OpenAiConfig::from_json(l["openai"]);
      if (l.contains("retry")) c.llm.retry = RetryPolicy::from_json(l["retry"]);
      if (l.contains("mode")) {
        auto mode = parse_prompt_mode(l["mode"].get<std::string>());
        if (!mode) throw PipelineError(Kind::invalid_config, "unknown llm.mode " + l["mode"].dump());
        c.llm.mode = *mode;
      }
      if (l.contains("pairs")) {
        for (const auto& p : l["pairs"]) {
          c.llm.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        }
      }
      c.llm.system_name = l.value("system_name", c.llm.system_name);
      if (l.contains("split")) {
        auto split = parse_split(l["split"].get<std::string>());
        if (!split) throw PipelineError(Kind::invalid_config, "unknown llm.split");
        c.llm.split = *split;
      }
      c.llm.survey_repeats = l.value("survey_repeats", c.llm.survey_repeats);
    }
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.cache_dir = j.value("cache_dir", std::string());
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.strict = j.value("strict", c.strict);
  } catch (const json::exception& e) {
    throw PipelineError(Kind::invalid_config, e.what());
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(Kind::invalid_config, e.what());
  }
  return c;
}

Backends::Backends(const BackendConfig& config) {
  auto reject = [](std::string_view role, const std::string& name) {
    throw PipelineError(PipelineError::Kind::invalid_config,
                        std::string(role) + " backend '" + name + "' is not available in this build");
  };
  if (config.encoder != "stub") reject("encoder", config.encoder);
  if (config.lang_id != "stub") reject("lang_id", config.lang_id);
  if (config.generator != "stub") reject("generator", config.generator);
  if (config.token_encoder != "stub") reject("token_encoder", config.token_encoder);
  encoder_ = std::make_unique<StubEncoder>(config.encoder_dim);
  lang_id_ = std::make_unique<StubLanguageIdentifier>();
  generator_ = std::make_unique<StubGenerator>();
  token_encoder_ = std::make_unique<HashedTokenEncoder>(config.encoder_dim);
}

std::unique_ptr<DatasetSource> open_dataset(const DatasetConfig& config) {
  if (config.format == "jsonl") return std::make_unique<JsonlDataset>(config.name, config.path);
  if (config.format == "xlsum") return std::make_unique<XlsumDataset>(config.path, config.language);
  if (config.format == "crosssum") {
    return std::make_unique<CrossSumDataset>(config.path, config.source_lang, config.target_lang);
  }
  if (config.format == "cnndm") return std::make_unique<CnnDailyMailDataset>(config.path);
  throw PipelineError(PipelineError::Kind::invalid_config, "unknown dataset format '" + config.format + "'");
}

std::vector<DocumentRecord> load_split(const PipelineConfig& config, Split split) {
  auto dataset = open_dataset(config.dataset);
  try {
    return dataset->load(split, {config.strict}).records;
  } catch (const CorpusError& e) {
    if (e.kind() == CorpusError::Kind::io) {
      throw PipelineError(PipelineError::Kind::unreadable_dataset, e.detail(), e.detail());
    }
    throw;
  }
}

std::string version_string() { return CONVERSUM_VERSION; }

void write_manifest(const fs::path& dir, std::string_view command, const PipelineConfig& config,
                    double wall_seconds, const json& extra) {
  json manifest = {{"command", command},
                   {"config", config.to_json()},
                   {"version", version_string()},
                   {"wall_time_seconds", wall_seconds}};
  if (!extra.empty()) manifest["result"] = extra;
  write_json(dir / "manifest.json", manifest);
}

fs::path score_dump_path(const PipelineConfig& config, Split split) {
  return config.output_dir / "score" / (std::string(to_string(split)) + ".jsonl");
}

fs::path train_dir(const PipelineConfig& config) { return config.output_dir / "train"; }

GenerateResult cmd_generate(const PipelineConfig& config) {
  Stopwatch clock;
  Backends backends(config.backends);
  CandidateCache cache(config.cache_dir);
  const std::string fingerprint = config.generation.fingerprint();
  GenerateResult result;
  for (Split split : config.dataset.splits) {
    auto records = load_split(config, split);
    std::vector<DocumentRecord> pending;
    for (const auto& record : records) {
      std::optional<CandidateSet> hit;
      try {
        hit = cache.load(record.id, fingerprint);
      } catch (const GenerationError& e) {
        if (config.strict) throw;
        spdlog::warn("regenerating {}: {}", record.id, e.what());
      }
      if (hit) {
        ++result.cache_hits;
      } else {
        pending.push_back(record);
      }
    }
    auto sets = generate_all(pending, config.generation, backends.generator(), config.workers);
    for (const auto& set : sets) cache.store(set);
    result.generated += sets.size();
    spdlog::info("generate {}: {} generated, {} cache hits", to_string(split), sets.size(),
                 records.size() - pending.size());
  }
  write_manifest(config.output_dir / "generate", "generate", config, clock.seconds(),
                 {{"generated", result.generated}, {"cache_hits", result.cache_hits}});
  return result;
}

ScoreResult cmd_score(const PipelineConfig& config) {
  Stopwatch clock;
  Backends backends(config.backends);
  std::unique_ptr<EncoderDispatch> dispatch;
  const Encoder& encoder = shareable(backends.encoder(), dispatch);
  ScoringBackends scoring{encoder, backends.lang_id(), backends.tokenizer()};
  CandidateCache cache(config.cache_dir);
  const std::string fingerprint = config.generation.fingerprint();
  ScoreResult result;
  for (Split split : config.dataset.splits) {
    auto records = load_split(config, split);
    std::vector<CandidateSet> sets;
    for (const auto& record : records) sets.push_back(cached_candidates(cache, record, fingerprint));
    std::vector<RankedDocument> ranked(records.size());
    parallel_for(records.size(), config.workers, [&](std::size_t i) {
      ranked[i] = rank_candidates(sets[i], records[i].text, records[i].summary,
                                  records[i].target_lang, scoring);
    });
    std::string body;
    for (const auto& doc : ranked) {
      for (const auto& candidate : doc.candidates) {
        body += scored_candidate_to_json(doc.document_id, candidate).dump() + "\n";
        ++result.candidates;
      }
    }
    write_text(score_dump_path(config, split), body);
    result.documents += ranked.size();
    spdlog::info("score {}: {} documents", to_string(split), ranked.size());
  }
  write_manifest(config.output_dir / "score", "score", config, clock.seconds(),
                 {{"documents", result.documents}, {"candidates", result.candidates}});
  return result;
}

TrainHistory cmd_train(const PipelineConfig& config) {
  Stopwatch clock;
  Backends backends(config.backends);
  require_artifact(score_dump_path(config, Split::train), "score");
  require_artifact(score_dump_path(config, Split::validation), "score");
  auto train_set = load_examples(config, Split::train, backends.encoder());
  auto val_set = load_examples(config, Split::validation, backends.encoder());

  LinearScorer scorer(backends.encoder().dim());
  TrainOptions options;
  options.run_dir = train_dir(config);
  fs::create_directories(options.run_dir);
  auto outcome = train(scorer, train_set, val_set, config.train, options);
  write_manifest(options.run_dir, "train", config, clock.seconds(),
                 {{"steps", outcome.history.steps.size()},
                  {"best_checkpoint", outcome.history.best_checkpoint}});
  return outcome.history;
}

EvaluateResult cmd_evaluate(const PipelineConfig& config, const EvaluateOptions& options) {
  Stopwatch clock;
  Backends backends(config.backends);
  auto records = load_split(config, Split::test);
  CandidateCache cache(config.cache_dir);
  const std::string fingerprint = config.generation.fingerprint();
  std::vector<CandidateSet> sets;
  for (const auto& record : records) sets.push_back(cached_candidates(cache, record, fingerprint));

  std::optional<LinearScorer> scorer;
  fs::path checkpoint = options.checkpoint;
  if (!options.baseline_only) {
    if (checkpoint.empty()) {
      fs::path history_path = train_dir(config) / "history.json";
      require_artifact(history_path, "train");
      auto history = TrainHistory::from_json(read_json(history_path));
      checkpoint = train_dir(config) / "checkpoints" / history.best_checkpoint / "params.json";
    }
    require_artifact(checkpoint, "train");
    scorer.emplace(backends.encoder().dim());
    load_parameters(checkpoint, *scorer);
  }

  std::vector<SystemOutput> baseline_outputs;
  std::vector<SystemOutput> system_outputs;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& candidates = sets[i].candidates;
    auto top_beam = std::find_if(candidates.begin(), candidates.end(),
                                 [](const CandidateSummary& c) { return c.group_index == 0; });
    if (top_beam == candidates.end()) top_beam = candidates.begin();
    baseline_outputs.push_back({records[i].id, top_beam->text});
    if (scorer) {
      // No reference exists at inference time; the source stands in for it.
      EmbeddingVector source = encode(records[i].text, backends.encoder());
      std::vector<double> scores;
      for (const auto& c : candidates) {
        scores.push_back(scorer->score(encode(c.text, backends.encoder()), source, source));
      }
      system_outputs.push_back({records[i].id, candidates[descending_order(scores).front()].text});
    }
  }

  json snapshot = experiment_snapshot(config);
  fs::path out_dir = config.output_dir / "evaluate";
  EvaluateResult result{evaluate_system("baseline", baseline_outputs, records, backends.evaluation(),
                                        config.workers, snapshot),
                        std::nullopt};
  write_outputs(out_dir / "outputs_baseline.jsonl", baseline_outputs);
  write_report_files(out_dir, "report_baseline", result.baseline);
  if (scorer) {
    result.system = evaluate_system("ConVerSum", system_outputs, records, backends.evaluation(),
                                    config.workers, snapshot);
    write_outputs(out_dir / "outputs_conversum.jsonl", system_outputs);
    write_report_files(out_dir, "report_conversum", *result.system);
    write_text(out_dir / "comparison.md",
               emit_report(result.baseline, *result.system, ReportFormat::markdown));
    write_text(out_dir / "comparison.csv",
               emit_report(result.baseline, *result.system, ReportFormat::csv));
  }
  json extra = {{"baseline_only", options.baseline_only}, {"documents", records.size()}};
  if (scorer) extra["checkpoint"] = checkpoint.generic_string();
  write_manifest(out_dir, "evaluate", config, clock.seconds(), extra);
  return result;
}

CompareLlmResult cmd_compare_llm(const PipelineConfig& config, ChatClient* client) {
  Stopwatch clock;
  Backends backends(config.backends);
  std::unique_ptr<ChatClient> owned;
  if (client == nullptr) {
    if (config.llm.provider == "stub") {
      owned = std::make_unique<StubChatClient>();
    } else {
      owned = std::make_unique<OpenAiChatClient>(config.llm.openai);
    }
    client = owned.get();
  }
  LlmRequester requester(*client, config.llm.retry);
  auto records = load_split(config, config.llm.split);

  std::vector<LanguagePair> pairs = config.llm.pairs;
  for (auto& [source, target] : pairs) {
    source = *canonical_language(source);
    target = *canonical_language(target);
  }
  if (pairs.empty()) pairs = observed_pairs(records);

  ComparisonOptions options;
  options.system_name = config.llm.system_name;
  options.mode = config.llm.mode;
  options.config_snapshot = {{"llm", config.to_json()["llm"]}};
  if (options.mode == PromptMode::one_shot) {
    auto train_records = load_split(config, Split::train);
    for (const auto& pair : pairs) {
      auto view = language_pair_view(train_records, pair.first, pair.second);
      if (view.empty()) {
        throw PipelineError(PipelineError::Kind::missing_upstream_artifact,
                            "no training example for " + pair.first + "-" + pair.second);
      }
      options.shot_examples[pair] = {view.front().text, view.front().summary};
    }
  }

  CompareLlmResult result{run_comparison(pairs, records, options, requester, backends.evaluation()), {}};
  const auto& comparison = result.comparison;
  fs::path out_dir = config.output_dir / "compare_llm";
  write_transcript(out_dir / "transcript.jsonl", comparison.transcript);
  json failures = json::array();
  for (const auto& f : comparison.failures) {
    failures.push_back({{"document_id", f.document_id},
                        {"source_lang", f.source_lang},
                        {"target_lang", f.target_lang},
                        {"error", f.error_kind},
                        {"message", f.message}});
  }
  write_json(out_dir / "failures.json", failures);

  if (config.llm.survey_repeats > 0) {
    result.survey = run_confidence_survey(requester, config.llm.survey_repeats);
    std::string body;
    for (const auto& r : result.survey) {
      body += json{{"raw_text", r.raw_text}, {"model_id", r.model_id}, {"latency_ms", r.latency_ms}}
                  .dump(-1, ' ', false, json::error_handler_t::replace) +
              "\n";
    }
    write_text(out_dir / "survey.jsonl", body);
  }

  json extra = {{"samples", comparison.samples.size()}, {"failed", comparison.failures.size()}};
  if (comparison.report) {
    write_report_files(out_dir, "report_" + file_stem(options.system_name), *comparison.report);
    fs::path system_path = config.output_dir / "evaluate" / "report_conversum.json";
    if (fs::exists(system_path)) {
      auto system = EvalReport::from_json(read_json(system_path));
      std::set<LanguagePair> common;
      for (const auto& row : comparison.report->rows()) {
        if (system.find(row.source_lang, row.target_lang)) common.insert({row.source_lang, row.target_lang});
      }
      auto a = restrict_to(*comparison.report, common);
      auto b = restrict_to(system, common);
      if (a && b) write_text(out_dir / "comparison.md", emit_report(*a, *b, ReportFormat::markdown));
    }
  }
  write_manifest(out_dir, "compare-llm", config, clock.seconds(), extra);
  if (!comparison.report) throw Error("every LLM sample failed; see " + (out_dir / "failures.json").string());
  return result;
}

ChatReply StubChatClient::complete(const std::vector<ChatMessage>& messages) {
  static constexpr std::string_view kMarker = "concisely and informative. ";
  const std::string& prompt = messages.back().content;
  auto at = prompt.rfind(kMarker);
  ChatReply reply;
  reply.model_id = name();
  if (at == std::string::npos) {
    reply.content = "No ratings available.";
    return reply;
  }
  auto words = split_whitespace(std::string_view(prompt).substr(at + kMarker.size()));
  words.resize(std::min(words.size(), words_));
  reply.content = "Summary: " + join(words, " ");
  reply.prompt_tokens = split_whitespace(prompt).size();
  reply.completion_tokens = words.size() + 1;
  return reply;
}

}  // namespace conversum
