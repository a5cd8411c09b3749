#include <CLI11.hpp>

#include <iostream>

#include "misery/conductor.hpp"
#include "misery/dataset.hpp"
#include "misery/report.hpp"

using namespace misery;

namespace {

RunConfig load_config(const std::string& path, const std::string& out_dir) {
  auto config = RunConfig::load(path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  config.check_paths();
  return config;
}

int bench(const std::string& config_path, const std::string& out_dir, const std::string& strategy,
          std::optional<int> k, const std::string& model, bool dry_run) {
  auto config = load_config(config_path, out_dir);
  BenchmarkFilter filter;
  if (!strategy.empty()) filter.strategy = strategy_kind_from_string(strategy);
  filter.k = k;
  if (!model.empty()) filter.model = model;
  const auto records = load_dataset_file(config.dataset);

  if (dry_run) {
    for (const auto& line : describe_benchmark_plan(config, filter, records.size())) std::cout << line << '\n';
    return 0;
  }
  const auto run = run_benchmark_grid(records, config, filter);
  write_benchmark_outputs(run, config.output_dir);
  for (const auto& e : run.errors) std::cerr << "failed: " << e << '\n';
  for (const auto& r : run.results) {
    if (r.aborted) std::cerr << "aborted: " << r.model << ' ' << r.strategy.label() << " after " << r.failures
                             << " backend failures (partial results saved)\n";
  }
  std::vector<Json> docs;
  for (const auto& r : run.results) docs.push_back(r.to_json(false));
  if (!docs.empty()) std::cout << render_benchmark_table(docs);
  std::cerr << "wrote " << run.results.size() << " result(s) to " << config.output_dir << '\n';
  return run.successes() > 0 ? 0 : 1;
}

int game(const std::string& config_path, const std::string& out_dir, const std::string& seeds,
         const std::string& feedback, std::optional<std::size_t> episodes, bool dry_run) {
  auto config = load_config(config_path, out_dir);
  if (!seeds.empty()) config.seeds = parse_seed_list(seeds);
  if (!feedback.empty()) config.modes = parse_feedback_flag(feedback);
  if (episodes) config.episodes = *episodes;

  if (dry_run) {
    for (const auto& line : describe_gameshow_plan(config)) std::cout << line << '\n';
    return 0;
  }
  const auto records = load_dataset_file(config.dataset);
  const auto result = run_gameshow(records, config);
  write_gameshow_outputs(result, config.output_dir);
  for (const auto& run : result.runs) {
    if (!run.completed) {
      std::cerr << "failed: " << run.model << " seed " << run.seed << ' ' << to_string(run.mode) << ": " << run.error
                << '\n';
    }
  }
  std::cout << result.status_csv() << '\n';
  if (!result.reports.empty()) {
    std::vector<Json> docs;
    for (const auto& r : result.reports) docs.push_back(r.to_json(false));
    docs.push_back(result.summary_json());
    std::cout << render_report(docs);
  }
  return result.reports.empty() ? 1 : 0;
}

int report(const std::string& dir) {
  const auto docs = load_report_dir(dir);
  const auto text = render_report(docs);
  std::cout << text;
  return 0;
}

int summary(const std::string& path) {
  const auto records = load_dataset_file(path);
  std::cout << summary_to_json(summarize(records)).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Misery score prediction benchmark and game show"};
  app.require_subcommand(1);

  std::string config_path, out_dir, strategy, model, seeds, feedback, in_dir, data;
  std::optional<int> k;
  std::optional<std::size_t> episodes;
  bool dry_run = false;

  auto* b = app.add_subcommand("bench", "Leave-one-out regression benchmark");
  b->add_option("--config", config_path, "Run configuration (JSON)")->required();
  b->add_option("--out", out_dir, "Output directory (overrides the config)");
  b->add_option("--strategy", strategy, "zero_shot | cot_two_stage | few_shot_fixed | few_shot_random | few_shot_embedding");
  b->add_option("--k", k, "Exemplar count")->check(CLI::PositiveNumber);
  b->add_option("--model", model, "Only this configured model");
  b->add_flag("--dry-run", dry_run, "Print the planned calls and exit");

  auto* g = app.add_subcommand("game", "Game show tournament");
  g->add_option("--config", config_path, "Run configuration (JSON)")->required();
  g->add_option("--out", out_dir, "Output directory (overrides the config)");
  g->add_option("--seeds", seeds, "Comma-separated seeds, e.g. 12,123,1234");
  g->add_option("--feedback", feedback, "on | off | both")->check(CLI::IsMember({"on", "off", "both"}));
  g->add_option("--episodes", episodes, "Episodes per run")->check(CLI::PositiveNumber);
  g->add_flag("--dry-run", dry_run, "Print the planned calls and exit");

  auto* r = app.add_subcommand("report", "Render tables from a directory of JSON reports");
  r->add_option("--in", in_dir, "Directory holding bench_*.json / game_*.json")->required();

  auto* s = app.add_subcommand("summary", "Dataset summary statistics");
  s->add_option("--data", data, "Dataset CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (b->parsed()) return bench(config_path, out_dir, strategy, k, model, dry_run);
    if (g->parsed()) return game(config_path, out_dir, seeds, feedback, episodes, dry_run);
    if (r->parsed()) return report(in_dir);
    if (s->parsed()) return summary(data);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
