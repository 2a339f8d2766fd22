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

#ifndef KGEPB_RANKER_H_
#define KGEPB_RANKER_H_

#include <cstddef>
#include <span>
#include <vector>

#include "kgepb/graph.h"
#include "kgepb/model.h"

namespace kgepb {

struct ScoredEntity {
  EntityId entity;
  double score = 0.0;
};

// Descending score; equal scores fall back to ascending entity id.
inline bool RanksBefore(const ScoredEntity& a, const ScoredEntity& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.entity < b.entity;
}

// Ordered, duplicate-free top-K items for one user with non-increasing
// scores.
struct RecommendationList {
  EntityId user;
  std::vector<EntityId> items;
  std::vector<double> scores;

  size_t size() const { return items.size(); }
};

// Answers (head, relation, ?) over `candidates` minus `exclude`, fully
// ordered by RanksBefore. Fails when nothing is left to rank.
std::vector<ScoredEntity> RankTails(const EmbeddingModel& model, EntityId head,
                                    RelationId relation,
                                    std::span<const EntityId> candidates,
                                    std::span<const EntityId> exclude = {});

// First `k` of RankTails over item-role entities, excluding the user's
// known (head, relation, ?) tails in `graph`.
RecommendationList TopK(const EmbeddingModel& model, const KnowledgeGraph& graph,
                        EntityId user, RelationId relation, size_t k);

// TopK for every user-role entity, ascending by user id.
std::vector<RecommendationList> TopKForAllUsers(const EmbeddingModel& model,
                                                const KnowledgeGraph& graph,
                                                RelationId relation, size_t k);

// Fraction of held-out triples whose tail ranks within the top `k` among
// item-role candidates, with every other known tail of (head, relation)
// (from `graph` and `held_out`) filtered out.
double HitsAtK(const EmbeddingModel& model, std::span<const Triple> held_out,
               size_t k, const KnowledgeGraph& graph);

}  // namespace kgepb

#endif  // KGEPB_RANKER_H_
