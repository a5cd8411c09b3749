#include "misery/report.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "misery/game.hpp"
#include "misery/metrics.hpp"

namespace misery {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
      os << '|';
      for (const auto& c : cells) os << ' ' << c << " |";
      os << '\n';
    };
    line(header);
    os << '|';
    for (std::size_t i = 0; i < header.size(); ++i) os << " --- |";
    os << '\n';
    for (const auto& r : rows) line(r);
    return os.str();
  }
};

std::vector<Json> of_kind(std::span<const Json> docs, std::string_view kind) {
  std::vector<Json> out;
  for (const auto& d : docs) {
    if (d.is_object() && d.value("kind", "") == kind) out.push_back(d);
  }
  return out;
}

const std::array<std::pair<const char*, const char*>, 5> kFeedbackRows{{
    {"Round_1", kRound1Label},
    {"Round_2", kRound2Label},
    {"Bonus_Round", kBonusLabel},
    {"Overall", kOverallLabel},
    {"Avg_Distance_in_Round_3", kDistanceLabel},
}};

std::string feedback_block(const std::string& title, const Json& without, const Json& with) {
  Table t{{"Metric", "Without_Feedback", "With_Feedback"}, {}};
  for (const auto& [row, key] : kFeedbackRows) {
    t.rows.push_back({row, format_number(without.at(key)), format_number(with.at(key))});
  }
  return "### " + title + "\n\n" + t.str() + "\n";
}

}  // namespace

std::string format_number(const Json& value) {
  if (value.is_null()) return "n/a";
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
  const double d = value.get<double>();
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  if (ec != std::errc()) return "n/a";
  return std::string(buf, ptr);
}

std::string render_benchmark_table(std::span<const Json> docs) {
  std::vector<std::string> models;
  for (const auto& d : docs) {
    const auto m = d.at("model").get<std::string>();
    if (std::find(models.begin(), models.end(), m) == models.end()) models.push_back(m);
  }
  std::ostringstream os;
  for (const auto& model : models) {
    Table t{{"Metric"}, {}};
    std::vector<const Json*> cols;
    for (const auto& d : docs) {
      if (d.at("model") != model) continue;
      t.header.push_back(d.at("label").get<std::string>());
      cols.push_back(&d);
    }
    for (const char* label : {kMaeLabel, kRmseLabel, kPearsonLabel, kSpearmanLabel, kR2Label}) {
      std::vector<std::string> row{label};
      for (const auto* c : cols) {
        const auto& m = c->at("metrics");
        row.push_back(m.is_null() ? "n/a" : format_number(m.at(label)));
      }
      t.rows.push_back(std::move(row));
    }
    os << "### Benchmark: " << model << "\n\n" << t.str() << '\n';
  }
  return os.str();
}

std::string render_feedback_table(std::span<const Json> reports, std::span<const Json> summaries) {
  std::ostringstream os;
  // (model, seed) -> (static, adaptive)
  std::map<std::pair<std::string, std::uint64_t>, std::pair<const Json*, const Json*>> pairs;
  std::vector<std::pair<std::string, std::uint64_t>> order;
  for (const auto& r : reports) {
    const auto key = std::make_pair(r.at("model").get<std::string>(), r.at("seed").get<std::uint64_t>());
    if (!pairs.contains(key)) order.push_back(key);
    auto& slot = pairs[key];
    (r.at("feedback_mode") == "adaptive" ? slot.second : slot.first) = &r;
  }
  for (const auto& key : order) {
    const auto& [without, with] = pairs[key];
    if (without && with) os << feedback_block(key.first + ", seed " + std::to_string(key.second), *without, *with);
  }
  for (const auto& s : summaries) {
    std::map<std::string, std::pair<const Json*, const Json*>> by_model;
    std::vector<std::string> models;
    for (const auto& row : s.at("rows")) {
      const auto m = row.at("model").get<std::string>();
      if (!by_model.contains(m)) models.push_back(m);
      auto& slot = by_model[m];
      (row.at("feedback_mode") == "adaptive" ? slot.second : slot.first) = &row;
    }
    for (const auto& m : models) {
      const auto& [without, with] = by_model[m];
      if (without && with) os << feedback_block(m + ", mean over seeds", *without, *with);
    }
  }
  return os.str();
}

std::string render_model_table(std::span<const Json> reports, std::span<const Json> summaries) {
  Table t{{"Model", kRound1Label, kRound2Label, kBonusLabel, kOverallLabel, kDistanceLabel}, {}};
  auto add = [&](const std::string& label, const Json& row) {
    t.rows.push_back({label, format_number(row.at(kRound1Label)), format_number(row.at(kRound2Label)),
                      format_number(row.at(kBonusLabel)), format_number(row.at(kOverallLabel)),
                      format_number(row.at(kDistanceLabel))});
  };
  for (const auto& r : reports) {
    add(r.at("model").get<std::string>() + " (seed " + std::to_string(r.at("seed").get<std::uint64_t>()) + ", " +
            r.at("feedback_mode").get<std::string>() + ")",
        r);
  }
  for (const auto& s : summaries) {
    for (const auto& row : s.at("rows")) {
      add(row.at("model").get<std::string>() + " (mean, " + row.at("feedback_mode").get<std::string>() + ")", row);
    }
  }
  if (t.rows.empty()) return {};
  return "### Game show results\n\n" + t.str() + "\n";
}

std::string render_report(std::span<const Json> documents) {
  if (documents.empty()) throw ReportError("no reports to render");
  const auto bench = of_kind(documents, "benchmark");
  const auto games = of_kind(documents, "game_report");
  const auto summaries = of_kind(documents, "game_summary");
  if (bench.empty() && games.empty() && summaries.empty()) throw ReportError("no recognizable report documents");
  std::string out;
  out += render_feedback_table(games, summaries);
  out += render_model_table(games, summaries);
  if (!bench.empty()) out += render_benchmark_table(bench);
  return out;
}

std::vector<Json> load_report_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ReportError("report directory '" + dir + "' does not exist");
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Json> docs;
  for (const auto& p : paths) {
    std::ifstream in(p);
    try {
      Json j;
      in >> j;
      const auto kind = j.is_object() ? j.value("kind", "") : "";
      if (kind == "benchmark" || kind == "game_report" || kind == "game_summary") docs.push_back(std::move(j));
    } catch (const nlohmann::json::exception&) {
      // not one of ours
    }
  }
  return docs;
}

}  // namespace misery
