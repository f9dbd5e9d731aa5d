// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "conversum/languages.hpp"
#include "conversum/pipeline.hpp"

namespace conversum {
namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool strict = false;
  std::optional<std::string> dataset;
  std::optional<std::string> dataset_format;
  std::optional<std::string> dataset_name;
  std::optional<std::string> dataset_language;
  std::optional<std::string> dataset_source;
  std::optional<std::string> dataset_target;
  std::optional<std::string> output_dir;
  std::optional<std::string> cache_dir;
  std::vector<std::string> splits;
  std::string log_level = "info";
};

struct GenerateFlags {
  std::optional<std::size_t> num_candidates;
  std::optional<std::size_t> max_length;
  std::optional<double> diversity_penalty;
  std::vector<std::string> target_languages;
  std::optional<std::size_t> batch_size;
};

struct TrainFlags {
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> validate_every;
  std::optional<double> learning_rate;
  std::optional<std::string> lr_schedule;
  std::optional<double> warmup_fraction;
  std::optional<std::size_t> max_steps;
  std::optional<double> base_margin;
  bool fixed_margin = false;
};

struct EvaluateFlags {
  std::string checkpoint;
  bool baseline_only = false;
};

struct CompareFlags {
  std::optional<std::string> provider;
  std::optional<std::string> model;
  std::optional<std::string> base_url;
  std::optional<std::string> mode;
  std::vector<std::string> pairs;
  std::optional<std::string> system_name;
  std::optional<std::string> split;
  std::optional<std::size_t> survey_repeats;
  std::optional<std::size_t> max_retries;
  std::optional<std::size_t> max_concurrent;
  std::optional<long> min_interval_ms;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

template <typename T>
void apply(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

void setup_logging(const std::string& level) {
  auto logger = spdlog::get("conversum");
  if (!logger) logger = spdlog::stderr_color_mt("conversum");
  spdlog::set_default_logger(logger);
  auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") throw UsageError("unknown log level " + level);
  spdlog::set_level(parsed);
}

nlohmann::json read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError(PipelineError::Kind::invalid_config, "cannot read config " + path, path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError(PipelineError::Kind::invalid_config, path + ": " + e.what(), path);
  }
}

LanguagePair parse_pair(const std::string& text) {
  auto dash = text.find('-');
  if (dash == std::string::npos) throw UsageError("language pair must look like source-target: " + text);
  return {text.substr(0, dash), text.substr(dash + 1)};
}

Split parse_split_flag(const std::string& text) {
  auto split = parse_split(text);
  if (!split) throw UsageError("unknown split " + text);
  return *split;
}

PipelineConfig merge_config(const GlobalFlags& g, const GenerateFlags& gen, const TrainFlags& tr,
                            const CompareFlags& cmp) {
  PipelineConfig config;
  if (!g.config_path.empty()) config = PipelineConfig::from_json(read_config_file(g.config_path));

  apply(g.seed, config.seed);
  apply(g.workers, config.workers);
  if (g.strict) config.strict = true;
  if (g.dataset) config.dataset.path = *g.dataset;
  apply(g.dataset_format, config.dataset.format);
  apply(g.dataset_name, config.dataset.name);
  apply(g.dataset_language, config.dataset.language);
  apply(g.dataset_source, config.dataset.source_lang);
  apply(g.dataset_target, config.dataset.target_lang);
  if (g.output_dir) config.output_dir = *g.output_dir;
  if (g.cache_dir) config.cache_dir = *g.cache_dir;
  if (!g.splits.empty()) {
    config.dataset.splits.clear();
    for (const auto& s : g.splits) config.dataset.splits.push_back(parse_split_flag(s));
  }

  if (gen.num_candidates) {
    config.generation.num_candidates = *gen.num_candidates;
    config.generation.num_beam_groups = *gen.num_candidates;
  }
  apply(gen.max_length, config.generation.max_length);
  apply(gen.diversity_penalty, config.generation.diversity_penalty);
  apply(gen.batch_size, config.generation.batch_size);
  if (!gen.target_languages.empty()) config.generation.target_languages = gen.target_languages;
  for (auto& tag : config.generation.target_languages) {
    if (auto canonical = canonical_language(tag)) tag = *canonical;
  }

  apply(tr.epochs, config.train.epochs);
  apply(tr.batch_size, config.train.batch_size);
  apply(tr.validate_every, config.train.validate_every_steps);
  apply(tr.learning_rate, config.train.learning_rate);
  apply(tr.warmup_fraction, config.train.warmup_fraction);
  apply(tr.max_steps, config.train.max_steps);
  if (tr.lr_schedule) {
    auto schedule = parse_lr_schedule(*tr.lr_schedule);
    if (!schedule) throw UsageError("unknown lr schedule " + *tr.lr_schedule);
    config.train.lr_schedule = *schedule;
  }
  apply(tr.base_margin, config.loss.base_margin);
  if (tr.fixed_margin) config.loss.rank_scaled = false;

  apply(cmp.provider, config.llm.provider);
  apply(cmp.model, config.llm.openai.model);
  apply(cmp.base_url, config.llm.openai.base_url);
  if (cmp.mode) {
    auto mode = parse_prompt_mode(*cmp.mode);
    if (!mode || *mode == PromptMode::confidence_survey) throw UsageError("unknown mode " + *cmp.mode);
    config.llm.mode = *mode;
  }
  if (!cmp.pairs.empty()) {
    config.llm.pairs.clear();
    for (const auto& p : cmp.pairs) config.llm.pairs.push_back(parse_pair(p));
  }
  apply(cmp.system_name, config.llm.system_name);
  if (cmp.split) config.llm.split = parse_split_flag(*cmp.split);
  apply(cmp.survey_repeats, config.llm.survey_repeats);
  apply(cmp.max_retries, config.llm.retry.max_retries);
  apply(cmp.max_concurrent, config.llm.retry.max_concurrent);
  if (cmp.min_interval_ms) config.llm.retry.min_interval = std::chrono::milliseconds(*cmp.min_interval_ms);

  config.finalize();
  config.validate();
  return config;
}

void print_report(const EvalReport& report) {
  std::cout << emit_report(report, ReportFormat::markdown);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Contrastive re-ranking pipeline for cross-lingual summarization", "conversum"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config_path, "Pipeline config (JSON); flags override its values");
  app.add_option("--seed", g.seed, "Seed for generation and training");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", g.strict, "Fail on the first invalid record");
  app.add_option("--dataset", g.dataset, "Dataset directory");
  app.add_option("--dataset-format", g.dataset_format, "jsonl | xlsum | crosssum | cnndm");
  app.add_option("--dataset-name", g.dataset_name, "Dataset display name");
  app.add_option("--dataset-language", g.dataset_language, "Language of an xlsum dataset");
  app.add_option("--dataset-source", g.dataset_source, "Source language of a crosssum dataset");
  app.add_option("--dataset-target", g.dataset_target, "Target language of a crosssum dataset");
  app.add_option("--output-dir", g.output_dir, "Artifact directory");
  app.add_option("--cache-dir", g.cache_dir, "Candidate cache (default <output-dir>/cache)");
  app.add_option("--splits", g.splits, "Splits to process (train validation test)");
  app.add_option("--log-level", g.log_level, "trace | debug | info | warn | error | off");

  GenerateFlags gen;
  TrainFlags tr;
  EvaluateFlags ev;
  CompareFlags cmp;

  auto* generate = app.add_subcommand("generate", "Generate candidate summaries into the cache");
  generate->add_option("--num-candidates", gen.num_candidates, "Candidates (and beam groups) per document");
  generate->add_option("--max-length", gen.max_length, "Token cap per candidate");
  generate->add_option("--diversity-penalty", gen.diversity_penalty, "Inter-group diversity penalty");
  generate->add_option("--target-languages", gen.target_languages, "Languages cycled over beam groups");
  generate->add_option("--batch-size", gen.batch_size, "Generation batch size");

  auto* score = app.add_subcommand("score", "Rank cached candidates by LaSE");

  auto* train_cmd = app.add_subcommand("train", "Train the scorer with the contrastive ranking loss");
  train_cmd->add_option("--epochs", tr.epochs, "Training epochs");
  train_cmd->add_option("--batch-size", tr.batch_size, "Documents per step");
  train_cmd->add_option("--validate-every", tr.validate_every, "Validation interval in steps");
  train_cmd->add_option("--learning-rate", tr.learning_rate, "Peak learning rate");
  train_cmd->add_option("--lr-schedule", tr.lr_schedule, "constant | linear_decay | warmup_linear");
  train_cmd->add_option("--warmup-fraction", tr.warmup_fraction, "Warmup share of total steps");
  train_cmd->add_option("--max-steps", tr.max_steps, "Cap on optimizer steps (0: no cap)");
  train_cmd->add_option("--base-margin", tr.base_margin, "Ranking loss margin");
  train_cmd->add_flag("--fixed-margin", tr.fixed_margin, "Do not scale the margin by rank distance");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate the baseline and the re-ranked system");
  evaluate->add_option("--checkpoint", ev.checkpoint, "Scorer parameters (default: best checkpoint)");
  evaluate->add_flag("--baseline-only", ev.baseline_only, "Evaluate the generator's top beam only");

  auto* compare = app.add_subcommand("compare-llm", "Summarize with a chat LLM and evaluate");
  compare->add_option("--provider", cmp.provider, "openai | stub");
  compare->add_option("--model", cmp.model, "Model id");
  compare->add_option("--base-url", cmp.base_url, "Provider base URL");
  compare->add_option("--mode", cmp.mode, "zero_shot | one_shot");
  compare->add_option("--pair", cmp.pairs, "Language pair source-target (repeatable)");
  compare->add_option("--system-name", cmp.system_name, "Report label");
  compare->add_option("--split", cmp.split, "Split to summarize (default test)");
  compare->add_option("--survey-repeats", cmp.survey_repeats, "Also send the confidence survey N times");
  compare->add_option("--max-retries", cmp.max_retries, "Retries on transient errors");
  compare->add_option("--max-concurrent", cmp.max_concurrent, "Requests in flight");
  compare->add_option("--min-interval-ms", cmp.min_interval_ms, "Spacing between request starts");

  for (auto* sub : {generate, score, train_cmd, evaluate, compare}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    setup_logging(g.log_level);
    PipelineConfig config = merge_config(g, gen, tr, cmp);

    if (generate->parsed()) {
      auto r = cmd_generate(config);
      std::cout << "generated " << r.generated << " candidate sets (" << r.cache_hits
                << " cache hits)\n";
    } else if (score->parsed()) {
      auto r = cmd_score(config);
      std::cout << "scored " << r.candidates << " candidates of " << r.documents << " documents\n";
    } else if (train_cmd->parsed()) {
      auto history = cmd_train(config);
      std::cout << "trained " << history.steps.size() << " steps; best checkpoint "
                << history.best_checkpoint << "\n";
    } else if (evaluate->parsed()) {
      auto r = cmd_evaluate(config, {ev.checkpoint, ev.baseline_only});
      if (r.system) {
        std::cout << emit_report(r.baseline, *r.system, ReportFormat::markdown);
      } else {
        print_report(r.baseline);
      }
    } else if (compare->parsed()) {
      auto r = cmd_compare_llm(config);
      print_report(*r.comparison.report);
      std::cout << r.comparison.failures.size() << " failed samples\n";
    }
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == PipelineError::Kind::missing_upstream_artifact ? kExitRuntime : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"conversum"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace conversum
