// Copyright 2026 The ConVerSum Authors
// SPDX-License-Identifier: Apache-2.0

#include "conversum/pipeline.hpp"

#include <gtest/gtest.h>

#include "conversum/cli.hpp"
#include "test_support.hpp"

namespace conversum {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

fs::path smoke_dataset() { return testing::source_dir() / "data" / "fixtures" / "smoke"; }

PipelineConfig smoke_config(const fs::path& output_dir) {
  auto j = nlohmann::json::parse(testing::read_file(testing::source_dir() / "data" / "configs" / "smoke.json"));
  auto config = PipelineConfig::from_json(j);
  config.dataset.path = smoke_dataset();
  config.output_dir = output_dir;
  config.finalize();
  config.validate();
  return config;
}

TEST(PipelineConfig, MissingKeysKeepDefaults) {
  auto config = PipelineConfig::from_json(nlohmann::json::object());
  EXPECT_EQ(config.generation.num_candidates, 8u);
  EXPECT_EQ(config.train.batch_size, 4u);
  EXPECT_EQ(config.workers, 1u);
  EXPECT_EQ(config.backends.encoder, "stub");
}

TEST(PipelineConfig, UnknownKeysRejected) {
  for (const char* text : {R"({"bogus": 1})", R"({"dataset": {"pathh": "x"}})",
                           R"({"backends": {"encoder": "stub", "gpu": true}})", R"({"llm": {"temp": 1}})"}) {
    try {
      PipelineConfig::from_json(nlohmann::json::parse(text));
      FAIL() << text;
    } catch (const PipelineError& e) {
      EXPECT_EQ(e.kind(), PipelineError::Kind::invalid_config) << text;
    }
  }
}

TEST(PipelineConfig, FinalizeAndRoundTrip) {
  PipelineConfig config;
  config.seed = 9;
  config.loss.base_margin = 0.05;
  config.output_dir = "out";
  config.finalize();
  EXPECT_EQ(config.generation.seed, 9u);
  EXPECT_EQ(config.train.seed, 9u);
  EXPECT_DOUBLE_EQ(config.train.loss.base_margin, 0.05);
  EXPECT_EQ(config.cache_dir, fs::path("out") / "cache");
  auto back = PipelineConfig::from_json(config.to_json());
  EXPECT_EQ(back.to_json(), config.to_json());
}

TEST(PipelineConfig, ValidationWrapsNestedErrors) {
  PipelineConfig config;
  config.dataset.path = "x";
  config.train.epochs = 0;
  config.finalize();
  try {
    config.validate();
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), PipelineError::Kind::invalid_config);
  }
  config = {};
  config.dataset.path = "x";
  config.backends.encoder = "labse";
  config.finalize();
  EXPECT_THROW(Backends backends(config.backends), PipelineError);
}

TEST(Pipeline, MissingDatasetIsUnreadable) {
  TempDir dir;
  PipelineConfig config;
  config.dataset.path = dir / "nope";
  config.output_dir = dir / "out";
  config.finalize();
  try {
    cmd_generate(config);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), PipelineError::Kind::unreadable_dataset);
  }
}

TEST(Pipeline, ScoreWithoutGenerateIsMissingArtifact) {
  TempDir dir;
  auto config = smoke_config(dir / "out");
  try {
    cmd_score(config);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), PipelineError::Kind::missing_upstream_artifact);
  }
  try {
    cmd_train(config);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.kind(), PipelineError::Kind::missing_upstream_artifact);
  }
}

TEST(Pipeline, SmokeRunMatchesOracleBaseline) {
  TempDir dir;
  auto config = smoke_config(dir / "out");

  auto generated = cmd_generate(config);
  EXPECT_EQ(generated.generated, 12u);
  EXPECT_EQ(generated.cache_hits, 0u);
  auto again = cmd_generate(config);
  EXPECT_EQ(again.generated, 0u);
  EXPECT_EQ(again.cache_hits, 12u);

  auto scored = cmd_score(config);
  EXPECT_EQ(scored.documents, 12u);
  EXPECT_EQ(scored.candidates, 96u);
  EXPECT_TRUE(fs::exists(score_dump_path(config, Split::test)));

  auto history = cmd_train(config);
  EXPECT_EQ(history.steps.size(), 50u);
  EXPECT_FALSE(history.best_checkpoint.empty());
  EXPECT_TRUE(fs::exists(train_dir(config) / "history.json"));

  auto result = cmd_evaluate(config);
  ASSERT_EQ(result.baseline.rows().size(), 1u);
  const auto& row = result.baseline.rows()[0];
  EXPECT_EQ(row.sample_count, 3u);
  // Frozen values from tests/oracles/stub_oracle.py.
  EXPECT_NEAR(row.mean_lase, 0.2572499953933271, 1e-9);
  EXPECT_NEAR(row.mean_bertscore, 0.65684219462264914, 1e-9);
  ASSERT_TRUE(result.system.has_value());
  EXPECT_EQ(result.system->rows().size(), 1u);

  for (const char* step : {"generate", "score", "train", "evaluate"}) {
    auto manifest = nlohmann::json::parse(testing::read_file(dir / "out" / step / "manifest.json"));
    EXPECT_EQ(manifest["command"], step);
    EXPECT_TRUE(manifest.contains("config"));
    EXPECT_EQ(manifest["version"], version_string());
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "evaluate" / "comparison.md"));
}

TEST(Pipeline, CompareLlmWithStubProvider) {
  TempDir dir;
  auto config = smoke_config(dir / "out");
  config.llm.provider = "stub";
  config.llm.pairs = {{"english", "english"}};
  config.llm.system_name = "stub-llm";
  StubChatClient client(20);
  auto result = cmd_compare_llm(config, &client);
  ASSERT_TRUE(result.comparison.report.has_value());
  EXPECT_EQ(result.comparison.report->rows()[0].sample_count, 3u);
  EXPECT_TRUE(result.comparison.failures.empty());
  EXPECT_TRUE(fs::exists(dir / "out" / "compare_llm" / "transcript.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "out" / "compare_llm" / "report_stub-llm.md"));
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  auto out = (dir / "out").string();
  auto dataset = smoke_dataset().string();
  EXPECT_EQ(run_cli({"--help"}), kExitOk);
  EXPECT_EQ(run_cli({"train", "--help"}), kExitOk);
  EXPECT_EQ(run_cli({"frobnicate"}), kExitUsage);
  EXPECT_EQ(run_cli({"generate", "--num-candidates", "many"}), kExitUsage);
  EXPECT_EQ(run_cli({"--dataset", (dir / "missing").string(), "--output-dir", out, "generate"}),
            kExitUsage);
  EXPECT_EQ(run_cli({"--dataset", dataset, "--output-dir", out, "train"}), kExitRuntime);
  EXPECT_EQ(run_cli({"--config", (dir / "absent.json").string(), "generate"}), kExitUsage);
}

TEST(Cli, FlagsOverrideConfigFile) {
  TempDir dir;
  auto out = (dir / "out").string();
  auto config = (testing::source_dir() / "data" / "configs" / "smoke.json").string();
  ASSERT_EQ(run_cli({"--config", config, "--dataset", smoke_dataset().string(), "--output-dir", out,
                     "--seed", "7", "generate", "--num-candidates", "4"}),
            kExitOk);
  auto manifest = nlohmann::json::parse(testing::read_file(dir / "out" / "generate" / "manifest.json"));
  EXPECT_EQ(manifest["config"]["seed"], 7);
  EXPECT_EQ(manifest["config"]["generation"]["num_candidates"], 4);
  EXPECT_EQ(manifest["config"]["generation"]["num_beam_groups"], 4);
  EXPECT_EQ(manifest["config"]["train"]["epochs"], 25);
}

}  // namespace
}  // namespace conversum
