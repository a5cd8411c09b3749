#include "misery/tournament.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <thread>

namespace misery {

Contestant contestant_from_spec(const ModelSpec& spec) {
  validate(spec);
  return {spec.name, [spec](std::uint64_t seed) { return make_backend(spec, seed); }, retry_policy_for(spec)};
}

std::vector<EpisodeSpec> sample_episodes(std::span<const MiseryRecord> records, std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<EpisodeSpec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_episode(records, rng));
  return out;
}

namespace {

struct RunSlot {
  const Contestant* model;
  std::uint64_t seed;
  FeedbackMode mode;
  RunStatus status;
  std::optional<GameReport> report;
};

void execute(RunSlot& slot, std::span<const MiseryRecord> records, const TournamentConfig& config) {
  slot.status = {slot.model->name, slot.seed, slot.mode, false, {}};
  try {
    const auto casts = sample_episodes(records, slot.seed, config.episodes);
    ModelClient client(slot.model->factory(slot.seed), slot.model->retry);
    GameOptions options{slot.mode, config.reprompt_budget, config.templates};
    std::vector<EpisodeResult> episodes;
    episodes.reserve(casts.size());
    for (std::size_t i = 0; i < casts.size(); ++i) episodes.push_back(run_episode(casts[i], client, options, i));
    const auto failed = std::find_if(episodes.begin(), episodes.end(),
                                     [](const EpisodeResult& e) { return e.status == EpisodeStatus::failed; });
    if (std::all_of(episodes.begin(), episodes.end(),
                    [](const EpisodeResult& e) { return e.status == EpisodeStatus::failed; })) {
      slot.status.error = failed != episodes.end() ? failed->error : "no episodes";
      return;
    }
    slot.report = aggregate(std::move(episodes), slot.model->name, slot.seed, slot.mode);
    slot.status.completed = true;
  } catch (const std::exception& e) {
    slot.status.error = e.what();
  }
}

}  // namespace

TournamentResult run_tournament(std::span<const MiseryRecord> records, const TournamentConfig& config) {
  if (config.models.empty()) throw GameError("tournament needs at least one model");
  if (config.seeds.empty()) throw GameError("tournament needs at least one seed");
  if (config.modes.empty()) throw GameError("tournament needs at least one feedback mode");
  if (config.episodes == 0) throw GameError("tournament needs at least one episode per run");

  std::vector<RunSlot> slots;
  for (const auto& model : config.models) {
    for (auto seed : config.seeds) {
      for (auto mode : config.modes) slots.push_back({&model, seed, mode, {}, std::nullopt});
    }
  }

  const std::size_t workers = std::clamp<std::size_t>(config.parallelism, 1, slots.size());
  if (workers == 1) {
    for (auto& slot : slots) execute(slot, records, config);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < slots.size(); i = next++) execute(slots[i], records, config);
      });
    }
    for (auto& t : pool) t.join();
  }

  TournamentResult result;
  for (auto& slot : slots) {
    result.runs.push_back(slot.status);
    if (slot.report) result.reports.push_back(std::move(*slot.report));
  }
  return result;
}

std::vector<std::string> TournamentResult::model_names() const {
  std::vector<std::string> names;
  for (const auto& r : runs) {
    if (std::find(names.begin(), names.end(), r.model) == names.end()) names.push_back(r.model);
  }
  return names;
}

std::vector<std::uint64_t> TournamentResult::seeds() const {
  std::vector<std::uint64_t> out;
  for (const auto& r : runs) {
    if (std::find(out.begin(), out.end(), r.seed) == out.end()) out.push_back(r.seed);
  }
  return out;
}

bool TournamentResult::completed(const std::string& model, std::uint64_t seed) const {
  bool any = false;
  for (const auto& r : runs) {
    if (r.model != model || r.seed != seed) continue;
    any = true;
    if (!r.completed) return false;
  }
  return any;
}

std::string TournamentResult::status_csv() const {
  std::ostringstream os;
  const auto models = model_names();
  os << "Seed";
  for (const auto& m : models) os << ',' << m;
  os << '\n';
  for (auto seed : seeds()) {
    os << "Seed " << seed;
    for (const auto& m : models) os << ',' << (completed(m, seed) ? "✓" : "×");
    os << '\n';
  }
  return os.str();
}

Json TournamentResult::summary_json() const {
  Json rows = Json::array();
  for (const auto& model : model_names()) {
    for (auto mode : {FeedbackMode::static_mode, FeedbackMode::adaptive}) {
      std::vector<const GameReport*> matching;
      for (const auto& r : reports) {
        if (r.model == model && r.mode == mode) matching.push_back(&r);
      }
      if (matching.empty()) continue;
      const double n = static_cast<double>(matching.size());
      double r1 = 0, r2 = 0, bonus = 0, dist = 0;
      std::size_t dist_n = 0;
      Json per_seed = Json::array();
      for (const auto* r : matching) {
        r1 += r->round1;
        r2 += r->round2;
        bonus += r->bonus;
        if (r->avg_distance_r3) {
          dist += *r->avg_distance_r3;
          ++dist_n;
        }
        per_seed.push_back(r->to_json(false));
      }
      Json row;
      row["model"] = model;
      row["feedback_mode"] = to_string(mode);
      row["seeds"] = matching.size();
      row[kRound1Label] = r1 / n;
      row[kRound2Label] = r2 / n;
      row[kBonusLabel] = bonus / n;
      row[kOverallLabel] = overall_accuracy(r1 / n, r2 / n, bonus / n);
      row[kDistanceLabel] = dist_n > 0 ? Json(dist / static_cast<double>(dist_n)) : Json(nullptr);
      row["per_seed"] = std::move(per_seed);
      rows.push_back(std::move(row));
    }
  }
  return Json{{"kind", "game_summary"}, {"rows", std::move(rows)}};
}

}  // namespace misery
