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

#include "kgepb/attack.h"

#include <algorithm>
#include <cmath>

#include "kgepb/error.h"
#include "kgepb/random.h"

namespace kgepb {

TrainConfig DefaultAttackTrainConfig() {
  TrainConfig config;
  config.kind = ModelKind::kRotatE;
  config.dim = 70;
  config.epochs = 100;
  config.batch_size = 64;
  return config;
}

UserPartition SplitAttackUsers(std::span<const EntityId> users, double fraction,
                               uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target fraction must lie in (0, 1)");
  }
  const size_t n_target =
      static_cast<size_t>(std::llround(fraction * static_cast<double>(users.size())));
  if (n_target == 0 || n_target >= users.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "target fraction leaves one side of the user split empty");
  }
  std::vector<EntityId> shuffled(users.begin(), users.end());
  std::sort(shuffled.begin(), shuffled.end());
  Rng rng(seed);
  Shuffle(std::span<EntityId>(shuffled), rng);
  UserPartition partition;
  partition.target.assign(shuffled.begin(), shuffled.begin() + n_target);
  partition.known.assign(shuffled.begin() + n_target, shuffled.end());
  std::sort(partition.target.begin(), partition.target.end());
  std::sort(partition.known.begin(), partition.known.end());
  return partition;
}

void CheckNoLeak(const AttackGraph& attack, const KnowledgeGraph& graph,
                 std::span<const EntityId> targets) {
  for (EntityId user : targets) {
    const auto attack_user = attack.graph.FindEntity(graph.EntityLabel(user));
    if (!attack_user) continue;
    if (!attack.graph.Tails(*attack_user, attack.sensitive).empty()) {
      throw Error(ErrorCode::kLeak, "attack graph holds the sensitive value of target " +
                                        graph.EntityLabel(user));
    }
  }
}

AttackGraph BuildAttackGraph(std::span<const ReleasedList> released,
                             const KnowledgeGraph& graph,
                             const AttackSetup& setup,
                             const UserPartition& partition) {
  const RelationId sensitive = graph.RelationOrDie(setup.sensitive_relation);
  const EndpointRoles roles = RolesForRelation(setup.sensitive_relation);

  AttackGraph attack;
  attack.sensitive = attack.graph.InternRelation(setup.sensitive_relation);
  for (EntityId value : graph.CandidateTails(sensitive)) {
    attack.candidate_values.push_back(
        attack.graph.InternEntity(graph.EntityLabel(value), roles.tail));
  }
  std::sort(attack.candidate_values.begin(), attack.candidate_values.end());
  // Users and items get the same ids whatever lists are released.
  const EndpointRoles rec_roles = RolesForRelation(relations::kRecommended);
  for (EntityId user : graph.EntitiesWithRole(rec_roles.head)) {
    attack.graph.InternEntity(graph.EntityLabel(user), rec_roles.head);
  }
  for (EntityId item : graph.EntitiesWithRole(rec_roles.tail)) {
    attack.graph.InternEntity(graph.EntityLabel(item), rec_roles.tail);
  }

  std::vector<const ReleasedList*> ordered;
  for (const ReleasedList& list : released) ordered.push_back(&list);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ReleasedList* a, const ReleasedList* b) {
                     return a->user < b->user;
                   });
  for (const ReleasedList* list : ordered) {
    std::vector<EntityId> items = list->items;
    std::sort(items.begin(), items.end());
    for (EntityId item : items) {
      attack.graph.AddTriple(graph.EntityLabel(list->user), relations::kRecommended,
                             graph.EntityLabel(item));
    }
  }
  for (EntityId user : partition.known) {
    for (EntityId value : graph.Tails(user, sensitive)) {
      attack.graph.AddTriple(graph.EntityLabel(user), setup.sensitive_relation,
                             graph.EntityLabel(value));
    }
  }
  if (setup.aux_genres) {
    if (const auto genre = graph.FindRelation(relations::kHasGenre)) {
      for (const Triple& t : graph.triples()) {
        if (t.relation != *genre) continue;
        attack.graph.AddTriple(graph.EntityLabel(t.head), relations::kHasGenre,
                               graph.EntityLabel(t.tail));
      }
    }
  }
  CheckNoLeak(attack, graph, partition.target);
  return attack;
}

std::vector<ScoredEntity> Infer(const EmbeddingModel& attack_model,
                                const AttackGraph& attack, EntityId user) {
  if (attack.candidate_values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidate sensitive values");
  }
  return RankTails(attack_model, user, attack.sensitive, attack.candidate_values);
}

double AttackSuccessRate(std::span<const UserInference> inferences) {
  if (inferences.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no target users");
  }
  size_t successes = 0;
  for (const UserInference& inference : inferences) successes += inference.success;
  return static_cast<double>(successes) / static_cast<double>(inferences.size());
}

AttackResult RunAttack(std::span<const ReleasedList> released,
                       const KnowledgeGraph& graph, const AttackSetup& setup,
                       const UserPartition& partition) {
  const RelationId sensitive = graph.RelationOrDie(setup.sensitive_relation);
  const AttackGraph attack = BuildAttackGraph(released, graph, setup, partition);

  TrainConfig train = setup.train;
  train.seed = setup.seed;
  const EmbeddingModel model = Train(attack.graph, train);

  AttackResult result;
  result.degenerate = attack.candidate_values.size() == 1;
  for (EntityId user : partition.target) {
    const auto truth = graph.Tails(user, sensitive);
    if (truth.size() != 1) {
      throw Error(ErrorCode::kFailedPrecondition,
                  "target " + graph.EntityLabel(user) +
                      " needs exactly one sensitive value");
    }
    const auto attack_user = attack.graph.FindEntity(graph.EntityLabel(user));
    if (!attack_user) {
      throw Error(ErrorCode::kFailedPrecondition,
                  "target " + graph.EntityLabel(user) + " has no released list");
    }
    UserInference inference{user, truth[0], {}, false};
    for (const ScoredEntity& s : Infer(model, attack, *attack_user)) {
      const EntityId value =
          *graph.FindEntity(attack.graph.EntityLabel(s.entity));
      inference.ranking.push_back({value, s.score});
    }
    inference.success = inference.ranking.front().entity == inference.true_value;
    result.inferences.push_back(std::move(inference));
  }
  result.success_rate = AttackSuccessRate(result.inferences);
  return result;
}

}  // namespace kgepb
