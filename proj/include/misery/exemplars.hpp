#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "misery/dataset.hpp"
#include "misery/embedding.hpp"
#include "misery/prompts.hpp"

namespace misery {

/// Candidate in-context examples for one test record.
struct ExemplarPool {
  std::vector<MiseryRecord> records;

  /// Every record except the test record and any record whose statement is
  /// identical to the test statement.
  static ExemplarPool leave_one_out(std::span<const MiseryRecord> all, const MiseryRecord& test);
};

/// The static exemplar order used by few_shot_fixed: the first k + 1 records
/// of a seeded shuffle of the whole dataset. The extra record stands in when
/// the test record is itself one of the first k.
std::vector<RecordId> default_fixed_order(std::span<const MiseryRecord> all, std::size_t k, std::uint64_t seed);

struct ScoredExemplar {
  MiseryRecord record;
  double similarity;
};

/// Picks k exemplars for a test record:
///   fixed     - the configured order, skipping records absent from the pool;
///   random    - k draws without replacement from Rng::derive(seed, test id);
///   embedding - the k most cosine-similar pool records, ties by lower id.
class ExemplarSelector {
 public:
  ExemplarSelector(PromptStrategy strategy, std::uint64_t seed, std::vector<RecordId> fixed_order = {},
                   Embedder* embedder = nullptr, EmbeddingCache* cache = nullptr);

  std::vector<MiseryRecord> select(const ExemplarPool& pool, const MiseryRecord& test) const;

  /// Embedding retrieval with similarities, best first.
  std::vector<ScoredExemplar> rank_by_similarity(const ExemplarPool& pool, const MiseryRecord& test) const;

  const std::vector<RecordId>& fixed_order() const { return fixed_order_; }

 private:
  PromptStrategy strategy_;
  std::uint64_t seed_;
  std::vector<RecordId> fixed_order_;
  Embedder* embedder_;
  EmbeddingCache* cache_;
};

}  // namespace misery
