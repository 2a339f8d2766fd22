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
#include <map>
#include <string>

#include "kgepb/error.h"

namespace kgepb {

std::vector<ScoredEntity> RankTails(const EmbeddingModel& model, EntityId head,
                                    RelationId relation,
                                    std::span<const EntityId> candidates,
                                    std::span<const EntityId> exclude) {
  std::vector<EntityId> excluded(exclude.begin(), exclude.end());
  std::sort(excluded.begin(), excluded.end());

  const std::vector<double> query =
      QueryPoint(model.shape(), model.Entity(head), model.Relation(relation));
  std::vector<ScoredEntity> ranked;
  ranked.reserve(candidates.size());
  for (EntityId c : candidates) {
    if (std::binary_search(excluded.begin(), excluded.end(), c)) continue;
    ranked.push_back({c, QueryScore(model.shape(), query, model.Entity(c))});
  }
  if (ranked.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no candidates left to rank after exclusion");
  }
  std::sort(ranked.begin(), ranked.end(), RanksBefore);
  return ranked;
}

RecommendationList TopK(const EmbeddingModel& model, const KnowledgeGraph& graph,
                        EntityId user, RelationId relation, size_t k) {
  const std::vector<EntityId> items = graph.EntitiesWithRole(Role::kItem);
  const auto known = graph.Tails(user, relation);
  std::vector<ScoredEntity> ranked;
  try {
    ranked = RankTails(model, user, relation, items, known);
  } catch (const Error&) {
    ranked.clear();
  }
  if (ranked.size() < k) {
    throw Error(ErrorCode::kFailedPrecondition,
                "user " + graph.EntityLabel(user) + " has " +
                    std::to_string(ranked.size()) + " candidate items, fewer than K=" +
                    std::to_string(k));
  }
  RecommendationList list{user, {}, {}};
  for (size_t i = 0; i < k; ++i) {
    list.items.push_back(ranked[i].entity);
    list.scores.push_back(ranked[i].score);
  }
  return list;
}

std::vector<RecommendationList> TopKForAllUsers(const EmbeddingModel& model,
                                                const KnowledgeGraph& graph,
                                                RelationId relation, size_t k) {
  std::vector<RecommendationList> lists;
  for (EntityId user : graph.EntitiesWithRole(Role::kUser)) {
    lists.push_back(TopK(model, graph, user, relation, k));
  }
  return lists;
}

double HitsAtK(const EmbeddingModel& model, std::span<const Triple> held_out,
               size_t k, const KnowledgeGraph& graph) {
  if (held_out.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no held-out triples");
  }
  // Group held-out tails per (head, relation) query.
  std::map<std::pair<EntityId, RelationId>, std::vector<EntityId>> queries;
  for (const Triple& t : held_out) queries[{t.head, t.relation}].push_back(t.tail);

  const std::vector<EntityId> items = graph.EntitiesWithRole(Role::kItem);
  std::vector<double> scores(graph.num_entities());
  std::vector<char> known(graph.num_entities(), 0);
  size_t hits = 0;
  for (const auto& [key, targets] : queries) {
    const auto [head, relation] = key;
    const std::vector<double> query =
        QueryPoint(model.shape(), model.Entity(head), model.Relation(relation));
    for (EntityId m : items) {
      scores[m.value] = QueryScore(model.shape(), query, model.Entity(m));
    }
    for (EntityId t : graph.Tails(head, relation)) known[t.value] = 1;
    for (EntityId t : targets) known[t.value] = 1;

    for (EntityId target : targets) {
      const ScoredEntity probe{
          target, QueryScore(model.shape(), query, model.Entity(target))};
      size_t rank = 0;
      for (size_t i = 0; i < items.size() && rank < k; ++i) {
        if (known[items[i].value]) continue;
        if (RanksBefore({items[i], scores[items[i].value]}, probe)) ++rank;
      }
      if (rank < k) ++hits;
    }

    for (EntityId t : graph.Tails(head, relation)) known[t.value] = 0;
    for (EntityId t : targets) known[t.value] = 0;
  }
  return static_cast<double>(hits) / static_cast<double>(held_out.size());
}

}  // namespace kgepb
