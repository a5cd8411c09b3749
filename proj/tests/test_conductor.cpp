#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "misery/conductor.hpp"
#include "misery/report.hpp"

using namespace misery;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig scripted_config(const fs::path& dir) {
  const auto records = fixture::synthetic_dataset(120, 11);
  std::ofstream out(dir / "data.csv");
  write_dataset(out, records);
  out.close();
  RunConfig c;
  c.dataset = (dir / "data.csv").string();
  ModelSpec s;
  s.name = "scripted";
  s.kind = BackendKind::scripted;
  s.replies = {"between", "below", "higher", "lower", "61", "[20, 50]", "[40, 60]", "[45, 55]"};
  s.cycle = true;
  ModelSpec o;
  o.name = "oracle";
  o.kind = BackendKind::oracle;
  o.noise_sd = 4;
  c.models = {s, o};
  c.strategies = {{StrategyKind::zero_shot, {}}, {StrategyKind::few_shot_fixed, {1, 2, 5}},
                  {StrategyKind::few_shot_embedding, {1, 2, 5}}};
  c.modes = {FeedbackMode::static_mode, FeedbackMode::adaptive};
  c.episodes = 5;
  return c;
}

std::vector<fs::path> files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Conductor, GameshowWritesSixReportsPerModelAndMatrix) {
  const auto dir = fixture::scratch_dir("conductor_game");
  auto cfg = scripted_config(dir);
  cfg.models.resize(1);
  const auto records = load_dataset_file(cfg.dataset);
  const auto result = run_gameshow(records, cfg);
  EXPECT_EQ(result.reports.size(), 6u);
  write_gameshow_outputs(result, (dir / "out").string());
  for (auto seed : {12, 123, 1234}) {
    for (const char* mode : {"static", "adaptive"}) {
      EXPECT_TRUE(fs::exists(dir / "out" / ("game_scripted_seed" + std::to_string(seed) + "_" + mode + ".json")));
      EXPECT_TRUE(fs::exists(dir / "out" / "transcripts" /
                             ("game_scripted_seed" + std::to_string(seed) + "_" + mode + "_ep4.json")));
    }
  }
  EXPECT_EQ(slurp(dir / "out" / "status.csv"), "Seed,scripted\nSeed 12,✓\nSeed 123,✓\nSeed 1234,✓\n");
  const auto transcript = Json::parse(slurp(dir / "out" / "transcripts" / "game_scripted_seed12_adaptive_ep0.json"));
  EXPECT_TRUE(transcript.at("exchanges")[0].contains("latency_ms"));
}

TEST(Conductor, RerunsAreByteIdentical) {
  const auto dir = fixture::scratch_dir("conductor_repeat");
  auto cfg = scripted_config(dir);
  cfg.parallelism = 4;
  const auto records = load_dataset_file(cfg.dataset);
  for (const char* run : {"a", "b"}) {
    write_gameshow_outputs(run_gameshow(records, cfg), (dir / run).string());
    write_benchmark_outputs(run_benchmark_grid(records, cfg), (dir / run).string());
  }
  const auto files = files_in(dir / "a");
  ASSERT_EQ(files, files_in(dir / "b"));
  std::size_t compared = 0;
  for (const auto& f : files) {
    if (f.parent_path() == "transcripts") continue;  // carry wall-clock latency
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    ++compared;
  }
  EXPECT_GE(compared, 12u + 14u + 2u);
}

TEST(Conductor, MixedFleetMarksFailingBackend) {
  const auto dir = fixture::scratch_dir("conductor_fleet");
  auto cfg = scripted_config(dir);
  ModelSpec dead;
  dead.name = "dead";
  dead.kind = BackendKind::http_chat;
  dead.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  dead.model_name = "x";
  dead.credential_env = "MISERY_CONDUCTOR_TEST_KEY";
  dead.max_attempts = 1;
  ::setenv("MISERY_CONDUCTOR_TEST_KEY", "k", 1);
  cfg.models.push_back(dead);
  cfg.episodes = 2;
  const auto records = load_dataset_file(cfg.dataset);
  const auto result = run_gameshow(records, cfg);
  EXPECT_EQ(result.status_csv(),
            "Seed,scripted,oracle,dead\nSeed 12,✓,✓,×\nSeed 123,✓,✓,×\nSeed 1234,✓,✓,×\n");
  EXPECT_EQ(result.reports.size(), 12u);
}

TEST(Conductor, BenchmarkGridAndFilters) {
  const auto dir = fixture::scratch_dir("conductor_bench");
  const auto cfg = scripted_config(dir);
  EXPECT_EQ(plan_benchmark(cfg).size(), 14u);
  BenchmarkFilter f;
  f.model = "oracle";
  f.strategy = StrategyKind::few_shot_embedding;
  f.k = 2;
  const auto jobs = plan_benchmark(cfg, f);
  ASSERT_EQ(jobs.size(), 1u);
  EXPECT_EQ(jobs[0].strategy.label(), "few_shot_embedding(k=2)");
  f.k = 3;
  EXPECT_THROW(plan_benchmark(cfg, f), ConfigError);

  const auto records = load_dataset_file(cfg.dataset);
  const auto plan = describe_benchmark_plan(cfg, {}, records.size());
  EXPECT_EQ(plan.size(), 14u);
  EXPECT_NE(plan[0].find("calls=120"), std::string::npos);

  const auto run = run_benchmark_grid(records, cfg);
  EXPECT_EQ(run.results.size(), 14u);
  EXPECT_TRUE(run.errors.empty());
  EXPECT_EQ(run.embedder, "hash-fnv1a-256");
  write_benchmark_outputs(run, (dir / "out").string());
  EXPECT_TRUE(fs::exists(dir / "out" / "bench_oracle_few_shot_fixed_k5.json"));
  const auto docs = load_report_dir((dir / "out").string());
  EXPECT_EQ(docs.size(), 14u);
  const auto text = render_report(docs);
  EXPECT_NE(text.find("few_shot_embedding(k=5)"), std::string::npos);
}

TEST(Conductor, GameshowPlanListsEveryRun) {
  const auto dir = fixture::scratch_dir("conductor_plan");
  const auto cfg = scripted_config(dir);
  const auto plan = describe_gameshow_plan(cfg);
  EXPECT_EQ(plan.size(), 2u * 3u * 2u);
  EXPECT_NE(plan[0].find("seed=12"), std::string::npos);
  EXPECT_NE(plan[0].find("calls=40..80"), std::string::npos);
}

TEST(Conductor, FileStems) {
  EXPECT_EQ(file_stem("gpt-4o mini/2024"), "gpt-4o_mini_2024");
  EXPECT_EQ(strategy_stem(PromptStrategy::make(StrategyKind::few_shot_random, 5)), "few_shot_random_k5");
}
