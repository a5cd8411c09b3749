#include "misery/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace misery {

namespace {

// Reads one logical CSV row. Returns false at end of input.
bool read_row(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // tolerated before \n
    } else if (c == '\n') {
      ++line_no;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw DatasetError("unterminated quoted field near line " + std::to_string(line_no));
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool blank_row(const std::vector<std::string>& fields) {
  return std::all_of(fields.begin(), fields.end(), [](const std::string& f) { return trim(f).empty(); });
}

std::string quote_csv(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos && trim(value) == value) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string csv_score(double score) {
  std::ostringstream os;
  os.precision(17);
  os << score;
  return os.str();
}

}  // namespace

std::string trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto start = text.find_first_not_of(ws);
  if (start == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(ws);
  return std::string(text.substr(start, end - start + 1));
}

std::vector<MiseryRecord> load_dataset(std::istream& in) {
  std::vector<std::string> fields;
  std::size_t line_no = 1;
  if (!read_row(in, fields, line_no)) throw DatasetError("dataset has no header row");
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  for (auto& f : fields) f = trim(f);
  if (fields.size() < 2 || fields.size() > 3 || fields[0] != "statement" || fields[1] != "score" ||
      (fields.size() == 3 && fields[2] != "category")) {
    throw DatasetError("header must be statement,score[,category]");
  }
  const std::size_t columns = fields.size();

  std::vector<MiseryRecord> records;
  std::size_t row = 0;
  for (;;) {
    const std::size_t row_line = line_no;
    if (!read_row(in, fields, line_no)) break;
    if (blank_row(fields)) continue;
    ++row;
    const std::string where = "row " + std::to_string(row) + " (line " + std::to_string(row_line) + ")";
    if (fields.size() < 2 || fields.size() > columns) {
      throw DatasetError(where + ": expected " + std::to_string(columns) + " columns, got " +
                         std::to_string(fields.size()));
    }
    MiseryRecord rec;
    rec.id = static_cast<RecordId>(row);
    rec.statement = trim(fields[0]);
    if (rec.statement.empty()) throw DatasetError(where + ": empty statement");
    const std::string score_text = trim(fields[1]);
    const char* first = score_text.data();
    const char* last = first + score_text.size();
    auto [ptr, ec] = std::from_chars(first, last, rec.score);
    if (score_text.empty() || ec != std::errc() || ptr != last || !std::isfinite(rec.score)) {
      throw DatasetError(where + ": non-numeric score '" + score_text + "'");
    }
    if (rec.score < 0.0 || rec.score > 100.0) {
      throw DatasetError(where + ": score " + score_text + " outside [0, 100]");
    }
    if (fields.size() == 3) {
      std::string cat = trim(fields[2]);
      if (!cat.empty()) rec.category = std::move(cat);
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DatasetError("dataset has no data rows");
  return records;
}

std::vector<MiseryRecord> load_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset '" + path + "'");
  return load_dataset(in);
}

void write_dataset(std::ostream& out, std::span<const MiseryRecord> records) {
  const bool with_category =
      std::any_of(records.begin(), records.end(), [](const MiseryRecord& r) { return r.category.has_value(); });
  out << (with_category ? "statement,score,category\n" : "statement,score\n");
  for (const auto& r : records) {
    out << quote_csv(r.statement) << ',' << csv_score(r.score);
    if (with_category) out << ',' << quote_csv(r.category.value_or(""));
    out << '\n';
  }
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DatasetError("percentile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

DatasetSummary summarize(std::span<const MiseryRecord> records) {
  if (records.size() < 2) throw DatasetError("summarize needs at least 2 records");
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(r.score);
  std::sort(scores.begin(), scores.end());

  DatasetSummary s;
  s.count = scores.size();
  const double n = static_cast<double>(s.count);
  s.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : scores) ss += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(ss / (n - 1.0));
  s.min = scores.front();
  s.max = scores.back();
  s.p25 = percentile_sorted(scores, 0.25);
  s.p50 = percentile_sorted(scores, 0.50);
  s.p75 = percentile_sorted(scores, 0.75);
  return s;
}

Json summary_to_json(const DatasetSummary& s) {
  Json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["std_dev"] = s.std_dev;
  j["min"] = s.min;
  j["max"] = s.max;
  j["p25"] = s.p25;
  j["p50"] = s.p50;
  j["p75"] = s.p75;
  return j;
}

std::vector<std::size_t> sample_indices(std::size_t count, std::size_t n, Rng& rng) {
  if (n > count) {
    throw DatasetError("cannot sample " + std::to_string(n) + " of " + std::to_string(count) + " records");
  }
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(count - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

std::vector<MiseryRecord> sample_without_replacement(std::span<const MiseryRecord> records, std::size_t n,
                                                     Rng& rng) {
  std::vector<MiseryRecord> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(records.size(), n, rng)) out.push_back(records[i]);
  return out;
}

const MiseryRecord* find_record(std::span<const MiseryRecord> records, RecordId id) {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

}  // namespace misery
