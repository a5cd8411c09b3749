#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "misery/exemplars.hpp"

using namespace misery;

namespace {

// Embeds by lookup so retrieval can be checked against hand-computed cosines.
class TableEmbedder : public Embedder {
 public:
  explicit TableEmbedder(std::map<std::string, std::vector<double>> table) : table_(std::move(table)) {}
  std::string identity() const override { return "table"; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    for (const auto& t : texts) out.push_back({table_.at(t)});
    return out;
  }

 private:
  std::map<std::string, std::vector<double>> table_;
};

std::vector<MiseryRecord> plane_records() {
  return {{1, "p1", 10, {}}, {2, "p2", 20, {}}, {3, "p3", 30, {}}, {4, "p4", 40, {}},
          {5, "p5", 50, {}}, {6, "p6", 60, {}}, {7, "query", 70, {}}};
}

TableEmbedder plane_embedder() {
  return TableEmbedder({{"p1", {1, 0}},
                        {"p2", {0.8, 0.6}},
                        {"p3", {0, 1}},
                        {"p4", {-1, 0}},
                        {"p5", {0.6, 0.8}},
                        {"p6", {2, 0.2}},
                        {"query", {1, 1}}});
}

std::vector<RecordId> ids(const std::vector<MiseryRecord>& rs) {
  std::vector<RecordId> out;
  for (const auto& r : rs) out.push_back(r.id);
  return out;
}

std::vector<RecordId> sel_ids(const ExemplarSelector& s, const ExemplarPool& pool, const MiseryRecord& r) {
  return ids(s.select(pool, r));
}

}  // namespace

TEST(Exemplars, LeaveOneOutDropsTestAndDuplicates) {
  std::vector<MiseryRecord> all{{1, "a", 1, {}}, {2, "b", 2, {}}, {3, "a", 3, {}}, {4, "c", 4, {}}};
  const auto pool = ExemplarPool::leave_one_out(all, all[0]);
  EXPECT_EQ(ids(pool.records), (std::vector<RecordId>{2, 4}));
}

TEST(Exemplars, HandComputedRetrieval) {
  auto records = plane_records();
  auto embedder = plane_embedder();
  const auto& query = records.back();
  const auto pool = ExemplarPool::leave_one_out(records, query);
  ExemplarSelector sel(PromptStrategy::make(StrategyKind::few_shot_embedding, 3), 12, {}, &embedder);
  const auto ranked = sel.rank_by_similarity(pool, query);
  std::vector<RecordId> order;
  for (const auto& s : ranked) order.push_back(s.record.id);
  // 2 and 5 tie at 0.98995, 1 and 3 at 0.70711: lower id first
  EXPECT_EQ(order, (std::vector<RecordId>{2, 5, 6, 1, 3, 4}));
  EXPECT_NEAR(ranked[2].similarity, 2.2 / (std::sqrt(2.0) * std::sqrt(4.04)), 1e-12);
  EXPECT_EQ(ids(sel.select(pool, query)), (std::vector<RecordId>{2, 5, 6}));

  EmbeddingCache cache;
  ExemplarSelector cached(PromptStrategy::make(StrategyKind::few_shot_embedding, 3), 12, {}, &embedder, &cache);
  EXPECT_EQ(ids(cached.select(pool, query)), (std::vector<RecordId>{2, 5, 6}));
  EXPECT_EQ(cache.size(), 7u);
}

TEST(Exemplars, FixedOrderSkipsTheTestRecord) {
  const auto records = fixture::synthetic_dataset(40, 2);
  const auto order = default_fixed_order(records, 3, 12);
  ASSERT_EQ(order.size(), 4u);
  EXPECT_EQ(order, default_fixed_order(records, 3, 12));
  ExemplarSelector sel(PromptStrategy::make(StrategyKind::few_shot_fixed, 3), 12, order);
  const auto* outsider = &records[0];
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.id) == order.end()) {
      outsider = &r;
      break;
    }
  }
  EXPECT_EQ(ids(sel.select(ExemplarPool::leave_one_out(records, *outsider), *outsider)),
            (std::vector<RecordId>(order.begin(), order.begin() + 3)));
  const auto* inside = find_record(records, order[1]);
  EXPECT_EQ(ids(sel.select(ExemplarPool::leave_one_out(records, *inside), *inside)),
            (std::vector<RecordId>{order.at(0), order.at(2), order.at(3)}));
}

TEST(Exemplars, RandomIsSeededPerRecordAndExcludesTest) {
  const auto records = fixture::synthetic_dataset(30, 4);
  ExemplarSelector a(PromptStrategy::make(StrategyKind::few_shot_random, 5), 12);
  ExemplarSelector b(PromptStrategy::make(StrategyKind::few_shot_random, 5), 12);
  ExemplarSelector c(PromptStrategy::make(StrategyKind::few_shot_random, 5), 13);
  bool any_diff = false;
  for (const auto& r : records) {
    const auto pool = ExemplarPool::leave_one_out(records, r);
    const auto x = sel_ids(a, pool, r);
    EXPECT_EQ(x, sel_ids(b, pool, r));
    any_diff |= x != sel_ids(c, pool, r);
    EXPECT_EQ(std::set<RecordId>(x.begin(), x.end()).size(), 5u);
    EXPECT_EQ(std::count(x.begin(), x.end(), r.id), 0);
  }
  EXPECT_TRUE(any_diff);
}

TEST(Exemplars, Errors) {
  const auto records = fixture::synthetic_dataset(5, 4);
  ExemplarSelector big(PromptStrategy::make(StrategyKind::few_shot_random, 5), 1);
  EXPECT_THROW(big.select(ExemplarPool::leave_one_out(records, records[0]), records[0]), PromptError);
  ExemplarSelector ok(PromptStrategy::make(StrategyKind::few_shot_random, 2), 1);
  EXPECT_THROW(ok.select(ExemplarPool{records}, records[0]), PromptError);
  EXPECT_THROW(ExemplarSelector(PromptStrategy::make(StrategyKind::few_shot_embedding, 2), 1), PromptError);
  EXPECT_THROW(ExemplarSelector(PromptStrategy::make(StrategyKind::zero_shot), 1), PromptError);
}

TEST(Exemplars, HashRetrievalMatchesBruteForce) {
  const auto records = fixture::synthetic_dataset(50, 9);
  HashEmbedder e;
  ExemplarSelector sel(PromptStrategy::make(StrategyKind::few_shot_embedding, 5), 12, {}, &e);
  for (const auto& q : records) {
    const auto pool = ExemplarPool::leave_one_out(records, q);
    std::vector<std::pair<double, RecordId>> brute;
    const auto qv = e.embed_one(q.statement);
    for (const auto& r : pool.records) brute.push_back({-cosine_similarity(qv, e.embed_one(r.statement)), r.id});
    std::sort(brute.begin(), brute.end());
    std::vector<RecordId> expect;
    for (int i = 0; i < 5; ++i) expect.push_back(brute[i].second);
    EXPECT_EQ(ids(sel.select(pool, q)), expect);
  }
}
