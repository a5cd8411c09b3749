#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "misery/dataset.hpp"
#include "misery/rng.hpp"

namespace misery::fixture {

/// Seeded stand-in for the real dataset: distinct statements, integer scores
/// in [1, 100] drawn around the middle of the scale. Only the shape matters to
/// the tests that use it; the numbers mean nothing.
inline std::vector<MiseryRecord> synthetic_dataset(std::size_t n = 516, std::uint64_t seed = 20240) {
  static const std::array<const char*, 16> who{
      "You", "Your roommate", "Your boss", "Your sister", "Your neighbour", "Your best friend",
      "Your landlord", "Your partner", "Your dentist", "Your teammate", "Your cousin", "Your mentor",
      "Your child", "Your coworker", "Your dog", "Your grandmother"};
  static const std::array<const char*, 20> what{
      "spills coffee on your laptop", "forgets your birthday", "loses the car keys",
      "cancels the trip at the last minute", "breaks your favourite mug", "misses the flight",
      "eats your leftovers", "reads your diary", "crashes the rental car", "floods the bathroom",
      "locks you out of the house", "deletes the shared photos", "shows up two hours late",
      "reveals a secret at dinner", "borrows money and vanishes", "scratches the new phone",
      "ruins the wedding cake", "gets food poisoning", "wins the lottery without you",
      "sets off the fire alarm"};
  static const std::array<const char*, 14> when{
      "on a Monday morning", "during a job interview", "at a funeral", "in front of your parents",
      "on vacation", "right before an exam", "in the rain", "at midnight", "on your wedding day",
      "during a blackout", "at the airport", "on a first date", "in a crowded train", "at the hospital"};

  const std::size_t combos = who.size() * what.size() * when.size();
  Rng rng(seed);
  const auto picks = sample_indices(combos, n, rng);
  std::vector<MiseryRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = picks[i];
    MiseryRecord r;
    r.id = static_cast<RecordId>(i + 1);
    r.statement = std::string(who[c % who.size()]) + " " + what[(c / who.size()) % what.size()] + " " +
                  when[c / (who.size() * what.size())] + ".";
    r.score = std::clamp(std::round(56.0 + 17.5 * rng.normal()), 1.0, 100.0);
    out.push_back(std::move(r));
  }
  return out;
}

/// The real dataset, when present: $MISERY_DATASET or data/misery_dataset.csv.
inline std::optional<std::string> real_dataset_path() {
  if (const char* env = std::getenv("MISERY_DATASET"); env && *env) {
    if (std::filesystem::exists(env)) return std::string(env);
  }
  const auto p = std::filesystem::path(MISERY_SOURCE_DIR) / "data" / "misery_dataset.csv";
  if (std::filesystem::exists(p)) return p.string();
  return std::nullopt;
}

/// Real dataset if available, synthetic otherwise.
inline std::vector<MiseryRecord> evaluation_dataset() {
  if (auto p = real_dataset_path()) return load_dataset_file(*p);
  return synthetic_dataset();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("misery_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace misery::fixture
