// Copyright 2026 The kgepb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kgepb/ranker.h"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "kgepb/error.h"
#include "oracles.h"
#include "test_util.h"

namespace kgepb {
namespace {

TEST_CASE("rank_tails on hand-set embeddings") {
  EmbeddingModel m({ModelKind::kTransE, 1, 6.0, 2}, 4, 1);
  const double values[] = {0.0, 2.0, 0.5, 2.0};
  std::copy(std::begin(values), std::end(values), m.mutable_entity_table().begin());
  const EntityId candidates[] = {EntityId{3}, EntityId{1}, EntityId{2}};

  const auto ranked = RankTails(m, EntityId{0}, RelationId{0}, candidates);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].entity == EntityId{2});
  // Entities 1 and 3 tie; the lower id comes first.
  CHECK(ranked[1].entity == EntityId{1});
  CHECK(ranked[2].entity == EntityId{3});
  CHECK(ranked[1].score == ranked[2].score);

  const EntityId all[] = {EntityId{1}, EntityId{2}, EntityId{3}};
  CHECK_THROWS_AS(RankTails(m, EntityId{0}, RelationId{0}, candidates, all), Error);
}

TEST_CASE("rank_tails equals exhaustive enumeration on random toy models") {
  for (ModelKind kind : {ModelKind::kTransE, ModelKind::kRotatE}) {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      const ModelShape shape{kind, 3, 6.0, seed % 2 ? 1 : 2};
      const EmbeddingModel m = testing::RandomModel(shape, 5, 2, seed);
      const std::vector<EntityId> candidates = {EntityId{0}, EntityId{1}, EntityId{2},
                                                EntityId{3}, EntityId{4}};
      const std::vector<EntityId> exclude = {EntityId{static_cast<uint32_t>(seed % 5)}};
      const EntityId head{static_cast<uint32_t>(seed % 3)};
      const RelationId rel{static_cast<uint32_t>(seed % 2)};
      std::vector<EntityId> got;
      for (const ScoredEntity& s : RankTails(m, head, rel, candidates, exclude)) {
        got.push_back(s.entity);
      }
      CHECK(got == oracles::EnumerateRanking(m, head, rel, candidates, exclude));

      // A strictly increasing transform of scores keeps the order.
      std::vector<ScoredEntity> transformed;
      for (EntityId c : got) {
        transformed.push_back({c, m.Plausibility(Triple{head, rel, c})});
      }
      CHECK(std::is_sorted(transformed.begin(), transformed.end(), RanksBefore));
    }
  }
}

TEST_CASE("top_k") {
  const KnowledgeGraph g = testing::ToyInteractionGraph(
      3, 6, {{0, 1}, {2}, {0, 3, 5}});
  const RelationId rel = g.RelationOrDie("interactedWith");
  const EmbeddingModel m = testing::RandomModel(
      {ModelKind::kRotatE, 4, 6.0, 2}, g.num_entities(), g.num_relations(), 3);
  const EntityId user = *g.FindEntity("u0");

  SUBCASE("K equal to all unseen items gives a permutation of them") {
    const RecommendationList list = TopK(m, g, user, rel, 4);
    std::set<EntityId> items(list.items.begin(), list.items.end());
    CHECK(items.size() == 4);
    CHECK_FALSE(items.contains(*g.FindEntity("i0")));
    CHECK_FALSE(items.contains(*g.FindEntity("i1")));
    CHECK(std::is_sorted(list.scores.rbegin(), list.scores.rend()));
  }
  SUBCASE("top-1 is the brute-force argmax") {
    for (EntityId u : g.EntitiesWithRole(Role::kUser)) {
      const auto known = g.Tails(u, rel);
      const auto order = oracles::EnumerateRanking(m, u, rel, g.EntitiesWithRole(Role::kItem),
                                                   known);
      CHECK(TopK(m, g, u, rel, 1).items.front() == order.front());
    }
  }
  SUBCASE("too few candidates") {
    CHECK_THROWS_AS(TopK(m, g, user, rel, 5), Error);
  }
  SUBCASE("all users") {
    const auto lists = TopKForAllUsers(m, g, rel, 3);
    REQUIRE(lists.size() == 3);
    for (const auto& list : lists) CHECK(list.items.size() == 3);
  }
}

TEST_CASE("hits_at_k") {
  const KnowledgeGraph g = testing::ToyInteractionGraph(
      4, 8, {{0, 1, 2, 3, 4}, {1, 2, 5}, {0, 6, 7, 3}, {4, 5}});
  const RelationId rel = g.RelationOrDie("interactedWith");
  const Split split = SplitInteractions(g, rel, 0.5, 2);
  REQUIRE(!split.held_out.empty());

  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const EmbeddingModel m = testing::RandomModel(
        {seed % 2 ? ModelKind::kRotatE : ModelKind::kTransE, 3, 6.0, 2},
        g.num_entities(), g.num_relations(), seed);
    double previous = 0.0;
    for (size_t k = 1; k <= 8; ++k) {
      const double hits = HitsAtK(m, split.held_out, k, split.train);
      CHECK(hits == doctest::Approx(oracles::BruteForceHits(m, split.held_out, k, split.train)));
      CHECK(hits >= previous);
      previous = hits;
    }
    CHECK(previous == 1.0);
  }

  SUBCASE("a model that ranks every held-out item first scores 1") {
    const KnowledgeGraph d = testing::ToyInteractionGraph(
        3, 9, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}});
    const Split s = SplitInteractions(d, rel, 0.5, 4);
    // One axis per user; held-out items sit on their user's axis.
    EmbeddingModel m({ModelKind::kTransE, 3, 6.0, 2}, d.num_entities(), d.num_relations());
    for (EntityId u : d.EntitiesWithRole(Role::kUser)) m.MutableEntity(u)[u.value] = 1.0;
    for (EntityId item : d.EntitiesWithRole(Role::kItem)) {
      for (double& x : m.MutableEntity(item)) x = 100.0;
    }
    for (const Triple& t : s.held_out) {
      for (double& x : m.MutableEntity(t.tail)) x = 0.0;
      m.MutableEntity(t.tail)[t.head.value] = 1.0;
    }
    CHECK(HitsAtK(m, s.held_out, 1, s.train) == 1.0);
  }
  CHECK_THROWS_AS(HitsAtK(testing::RandomModel({ModelKind::kTransE, 2, 6.0, 2},
                                               g.num_entities(), 1, 1),
                          {}, 5, split.train),
                  Error);
}

}  // namespace
}  // namespace kgepb
