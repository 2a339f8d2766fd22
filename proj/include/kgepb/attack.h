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

#ifndef KGEPB_ATTACK_H_
#define KGEPB_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgepb/graph.h"
#include "kgepb/model.h"
#include "kgepb/ranker.h"
#include "kgepb/train.h"

namespace kgepb {

// The attacker's model capacity: dim 70, 100 epochs, batch 64.
TrainConfig DefaultAttackTrainConfig();

struct AttackSetup {
  std::string sensitive_relation = std::string(relations::kHasGender);
  double target_fraction = 0.10;
  // Public item metadata (movie genres) available to the attacker.
  bool aux_genres = true;
  TrainConfig train = DefaultAttackTrainConfig();
  uint64_t seed = 0;
};

struct UserPartition {
  std::vector<EntityId> known;   // sensitive value visible to the attacker
  std::vector<EntityId> target;  // sensitive value hidden
};

// Seeded uniform split with |target| = round(fraction * |users|); both sides
// sorted ascending. Fails when either side would be empty.
UserPartition SplitAttackUsers(std::span<const EntityId> users, double fraction,
                               uint64_t seed);

// One released list per user, in the recommender graph's ids.
struct ReleasedList {
  EntityId user;
  std::vector<EntityId> items;
};

// The adversary's knowledge graph. Entities are interned by label, so ids
// differ from the recommender graph; lookups go through labels.
struct AttackGraph {
  KnowledgeGraph graph;
  RelationId sensitive;
  // Candidate sensitive values, in attack-graph ids, ascending.
  std::vector<EntityId> candidate_values;
};

// Builds (u, recommended, m) for every released item, (u, sensitive, v) for
// known users only, and (m, hasGenre, x) for every item when aux_genres is
// on. Fails with kLeak if any target user's sensitive triple is present.
AttackGraph BuildAttackGraph(std::span<const ReleasedList> released,
                             const KnowledgeGraph& graph,
                             const AttackSetup& setup,
                             const UserPartition& partition);

// Fails with kLeak when `attack` holds a sensitive triple of a target user.
void CheckNoLeak(const AttackGraph& attack, const KnowledgeGraph& graph,
                 std::span<const EntityId> targets);

struct UserInference {
  EntityId user;        // recommender-graph id
  EntityId true_value;  // recommender-graph id
  std::vector<ScoredEntity> ranking;  // recommender-graph ids
  bool success = false;
};

// Ranks the candidate values for `user` (attack-graph id); the first entry
// is the prediction.
std::vector<ScoredEntity> Infer(const EmbeddingModel& attack_model,
                                const AttackGraph& attack, EntityId user);

struct AttackResult {
  std::vector<UserInference> inferences;
  double success_rate = 0.0;  // I_u
  // Only one candidate value exists, so every inference is trivially right.
  bool degenerate = false;
};

double AttackSuccessRate(std::span<const UserInference> inferences);

// Full attack: build the graph, train the attack model with setup.train
// (seeded from setup.seed), infer every target user.
AttackResult RunAttack(std::span<const ReleasedList> released,
                       const KnowledgeGraph& graph, const AttackSetup& setup,
                       const UserPartition& partition);

}  // namespace kgepb

#endif  // KGEPB_ATTACK_H_
