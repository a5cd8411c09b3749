#include "misery/conductor.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace misery {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::size_t calls_per_record(const PromptStrategy& s) { return s.kind == StrategyKind::cot_two_stage ? 2 : 1; }

}  // namespace

std::size_t BenchmarkRun::successes() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.aborted && r.metrics; }));
}

std::string file_stem(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

std::string strategy_stem(const PromptStrategy& s) {
  std::string out(to_string(s.kind));
  if (s.k) out += "_k" + std::to_string(*s.k);
  return out;
}

std::vector<BenchmarkJob> plan_benchmark(const RunConfig& config, const BenchmarkFilter& filter) {
  std::vector<BenchmarkJob> jobs;
  for (const auto& model : config.models) {
    if (filter.model && model.name != *filter.model) continue;
    for (const auto& grid : config.strategies) {
      if (filter.strategy && grid.kind != *filter.strategy) continue;
      for (const auto& s : grid.expand()) {
        if (filter.k && s.k != filter.k) continue;
        jobs.push_back({&model, s});
      }
    }
  }
  if (jobs.empty()) throw ConfigError("benchmark grid is empty after filtering");
  return jobs;
}

std::vector<std::string> describe_benchmark_plan(const RunConfig& config, const BenchmarkFilter& filter,
                                                 std::size_t record_count) {
  std::vector<std::string> lines;
  for (const auto& job : plan_benchmark(config, filter)) {
    lines.push_back("bench model=" + job.model->name + " backend=" + std::string(to_string(job.model->kind)) +
                    " strategy=" + job.strategy.label() +
                    " calls=" + std::to_string(record_count * calls_per_record(job.strategy)));
  }
  return lines;
}

std::vector<std::string> describe_gameshow_plan(const RunConfig& config) {
  if (config.models.empty()) throw ConfigError("no models configured");
  std::vector<std::string> lines;
  const auto per_run = config.episodes * 8;
  for (const auto& model : config.models) {
    for (auto seed : config.seeds) {
      for (auto mode : config.modes) {
        lines.push_back("game model=" + model.name + " backend=" + std::string(to_string(model.kind)) +
                        " seed=" + std::to_string(seed) + " mode=" + std::string(to_string(mode)) +
                        " episodes=" + std::to_string(config.episodes) + " calls=" + std::to_string(per_run) + ".." +
                        std::to_string(per_run * (1 + static_cast<std::size_t>(config.reprompt_budget))));
      }
    }
  }
  return lines;
}

BenchmarkRun run_benchmark_grid(std::span<const MiseryRecord> records, const RunConfig& config,
                                const BenchmarkFilter& filter) {
  const auto jobs = plan_benchmark(config, filter);
  const auto templates = config.prompts_dir.empty() ? PromptTemplates::builtin()
                                                    : PromptTemplates::from_directory(config.prompts_dir);

  const bool needs_embedder = std::any_of(jobs.begin(), jobs.end(), [](const auto& j) {
    return j.strategy.kind == StrategyKind::few_shot_embedding;
  });
  std::unique_ptr<Embedder> embedder;
  EmbeddingCache cache;
  if (needs_embedder) {
    embedder = config.embedding.make();
    if (!config.embedding.cache_path.empty()) cache.load(config.embedding.cache_path);
  }

  std::vector<std::optional<BenchmarkResult>> slots(jobs.size());
  std::vector<std::string> errors(jobs.size());
  auto execute = [&](std::size_t i) {
    const auto& job = jobs[i];
    try {
      ModelClient client(make_backend(*job.model, config.benchmark_seed), retry_policy_for(*job.model));
      BenchmarkOptions options;
      options.seed = config.benchmark_seed;
      options.failure_threshold = config.failure_threshold;
      options.templates = &templates;
      options.embedder = embedder.get();
      options.cache = embedder ? &cache : nullptr;
      slots[i] = run_benchmark(records, client, job.model->name, job.strategy, options);
    } catch (const std::exception& e) {
      errors[i] = job.model->name + " " + job.strategy.label() + ": " + e.what();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(config.parallelism, 1, jobs.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) execute(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  if (embedder && !config.embedding.cache_path.empty()) cache.save(config.embedding.cache_path);

  BenchmarkRun run;
  if (embedder) run.embedder = embedder->identity();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (slots[i]) run.results.push_back(std::move(*slots[i]));
    if (!errors[i].empty()) run.errors.push_back(std::move(errors[i]));
  }
  return run;
}

TournamentResult run_gameshow(std::span<const MiseryRecord> records, const RunConfig& config) {
  if (config.models.empty()) throw ConfigError("no models configured");
  std::optional<PromptTemplates> custom;
  const PromptTemplates* templates = &PromptTemplates::builtin();
  if (!config.prompts_dir.empty()) {
    custom = PromptTemplates::from_directory(config.prompts_dir);
    templates = &*custom;
  }
  TournamentConfig t;
  for (const auto& m : config.models) t.models.push_back(contestant_from_spec(m));
  t.seeds = config.seeds;
  t.modes = config.modes;
  t.episodes = config.episodes;
  t.reprompt_budget = config.reprompt_budget;
  t.parallelism = config.parallelism;
  t.templates = templates;
  return run_tournament(records, t);
}

void write_benchmark_outputs(const BenchmarkRun& run, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root / "transcripts");
  for (const auto& r : run.results) {
    const auto stem = "bench_" + file_stem(r.model) + "_" + strategy_stem(r.strategy);
    write_json(root / (stem + ".json"), r.to_json(false));
    write_json(root / "transcripts" / (stem + ".json"), r.transcript.to_json(true));
  }
}

void write_gameshow_outputs(const TournamentResult& result, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root / "transcripts");
  for (const auto& report : result.reports) {
    const auto stem = "game_" + file_stem(report.model) + "_seed" + std::to_string(report.seed) + "_" +
                      std::string(to_string(report.mode));
    write_json(root / (stem + ".json"), report.to_json(true));
    for (const auto& ep : report.episodes) {
      write_json(root / "transcripts" / (stem + "_ep" + std::to_string(ep.index) + ".json"),
                 ep.transcript.to_json(true));
    }
  }
  write_text(root / "status.csv", result.status_csv());
  if (!result.reports.empty()) write_json(root / "game_summary.json", result.summary_json());
}

}  // namespace misery
