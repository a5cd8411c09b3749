#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "misery/json.hpp"
#include "misery/rng.hpp"

namespace misery {

using RecordId = std::int64_t;

/// One dataset row: an event description and its ground-truth misery score.
struct MiseryRecord {
  RecordId id = 0;
  std::string statement;
  double score = 0.0;
  std::optional<std::string> category;  // metadata only, never used in scoring

  bool operator==(const MiseryRecord&) const = default;
};

struct DatasetSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample (n - 1) form
  double min = 0.0;
  double max = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses comma-separated text with header `statement,score[,category]`.
/// Fields may be double-quoted ("" escapes a quote, quoted fields may span
/// lines). Ids are assigned 1..n in row order; statements and categories are
/// whitespace-trimmed and otherwise untouched.
std::vector<MiseryRecord> load_dataset(std::istream& in);
std::vector<MiseryRecord> load_dataset_file(const std::string& path);

/// Inverse of load_dataset (ids are implied by row order).
void write_dataset(std::ostream& out, std::span<const MiseryRecord> records);

DatasetSummary summarize(std::span<const MiseryRecord> records);
Json summary_to_json(const DatasetSummary& summary);

/// Linear interpolation between closest ranks on sorted data, q in [0, 1].
double percentile_sorted(std::span<const double> sorted, double q);

/// Partial Fisher-Yates over a copy of the input: for i in [0, n),
/// j = i + rng.uniform_below(count - i), swap(i, j); returns the first n.
std::vector<MiseryRecord> sample_without_replacement(std::span<const MiseryRecord> records,
                                                     std::size_t n, Rng& rng);

/// Index form of the same draw; used wherever records are addressed by position.
std::vector<std::size_t> sample_indices(std::size_t count, std::size_t n, Rng& rng);

const MiseryRecord* find_record(std::span<const MiseryRecord> records, RecordId id);

std::string trim(std::string_view text);

}  // namespace misery
