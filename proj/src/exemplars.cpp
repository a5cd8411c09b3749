#include "misery/exemplars.hpp"

#include <algorithm>

namespace misery {

ExemplarPool ExemplarPool::leave_one_out(std::span<const MiseryRecord> all, const MiseryRecord& test) {
  ExemplarPool pool;
  for (const auto& r : all) {
    if (r.id != test.id && r.statement != test.statement) pool.records.push_back(r);
  }
  return pool;
}

std::vector<RecordId> default_fixed_order(std::span<const MiseryRecord> all, std::size_t k, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0xF1ED);
  const std::size_t n = std::min(k + 1, all.size());
  std::vector<RecordId> ids;
  for (std::size_t i : sample_indices(all.size(), n, rng)) ids.push_back(all[i].id);
  return ids;
}

ExemplarSelector::ExemplarSelector(PromptStrategy strategy, std::uint64_t seed, std::vector<RecordId> fixed_order,
                                   Embedder* embedder, EmbeddingCache* cache)
    : strategy_(strategy), seed_(seed), fixed_order_(std::move(fixed_order)), embedder_(embedder), cache_(cache) {
  if (!strategy_.few_shot()) throw PromptError(strategy_.label() + " does not use exemplars");
  if (strategy_.kind == StrategyKind::few_shot_embedding && embedder_ == nullptr) {
    throw PromptError("embedding retrieval needs an embedder");
  }
}

std::vector<MiseryRecord> ExemplarSelector::select(const ExemplarPool& pool, const MiseryRecord& test) const {
  const auto k = static_cast<std::size_t>(*strategy_.k);
  if (find_record(pool.records, test.id) != nullptr) throw PromptError("exemplar pool contains the test record");
  if (k > pool.records.size()) {
    throw PromptError("k = " + std::to_string(k) + " exceeds pool size " + std::to_string(pool.records.size()));
  }
  switch (strategy_.kind) {
    case StrategyKind::few_shot_fixed: {
      std::vector<MiseryRecord> out;
      for (RecordId id : fixed_order_) {
        if (out.size() == k) break;
        if (const auto* r = find_record(pool.records, id)) out.push_back(*r);
      }
      if (out.size() < k) throw PromptError("fixed exemplar order has fewer than k usable records");
      return out;
    }
    case StrategyKind::few_shot_random: {
      Rng rng = Rng::derive(seed_, static_cast<std::uint64_t>(test.id));
      return sample_without_replacement(pool.records, k, rng);
    }
    case StrategyKind::few_shot_embedding: {
      auto ranked = rank_by_similarity(pool, test);
      std::vector<MiseryRecord> out;
      for (std::size_t i = 0; i < k; ++i) out.push_back(std::move(ranked[i].record));
      return out;
    }
    default:
      break;
  }
  throw PromptError("unsupported strategy");
}

std::vector<ScoredExemplar> ExemplarSelector::rank_by_similarity(const ExemplarPool& pool,
                                                                 const MiseryRecord& test) const {
  if (embedder_ == nullptr) throw PromptError("embedding retrieval needs an embedder");
  std::vector<EmbeddingVector> pool_vecs;
  EmbeddingVector query;
  if (cache_ != nullptr) {
    pool_vecs = cache_->lookup(*embedder_, pool.records);
    query = cache_->lookup(*embedder_, std::span(&test, 1)).front();
  } else {
    std::vector<std::string> texts;
    for (const auto& r : pool.records) texts.push_back(r.statement);
    texts.push_back(test.statement);
    auto all = embedder_->embed(texts);
    if (all.size() != texts.size()) throw EmbeddingError("embedder returned the wrong number of vectors");
    query = std::move(all.back());
    all.pop_back();
    pool_vecs = std::move(all);
  }
  std::vector<ScoredExemplar> scored;
  scored.reserve(pool.records.size());
  for (std::size_t i = 0; i < pool.records.size(); ++i) {
    scored.push_back({pool.records[i], cosine_similarity(query, pool_vecs[i])});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredExemplar& a, const ScoredExemplar& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.record.id < b.record.id;
  });
  return scored;
}

}  // namespace misery
