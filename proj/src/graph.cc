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

#include "kgepb/graph.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "kgepb/error.h"
#include "kgepb/random.h"

namespace kgepb {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kRoleConflict: return "role conflict";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kPoolExhausted: return "candidate pool exhausted";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kLeak: return "leak guard";
    case ErrorCode::kFailedPrecondition: return "failed precondition";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown";
}

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kUser: return "user";
    case Role::kItem: return "item";
    case Role::kAttributeValue: return "attribute-value";
    case Role::kOther: return "other";
  }
  return "other";
}

EndpointRoles RolesForRelation(std::string_view relation) {
  using namespace relations;
  if (relation == kInteractedWith || relation == kRecommended) {
    return {Role::kUser, Role::kItem};
  }
  if (relation == kHasGender || relation == kHasAgeGroup ||
      relation == kHasOccupation) {
    return {Role::kUser, Role::kAttributeValue};
  }
  if (relation == kHasGenre) return {Role::kItem, Role::kAttributeValue};
  return {Role::kOther, Role::kOther};
}

size_t KnowledgeGraph::TripleHash::operator()(const Triple& t) const {
  const uint64_t packed = (static_cast<uint64_t>(t.head.value) << 40) ^
                          (static_cast<uint64_t>(t.relation.value) << 20) ^
                          (static_cast<uint64_t>(t.tail.value) * 0x9e3779b97f4a7c15ULL);
  return static_cast<size_t>(Mix64(packed));
}

EntityId KnowledgeGraph::InternEntity(std::string_view label, Role role) {
  if (label.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty entity label");
  }
  if (auto it = entity_index_.find(std::string(label));
      it != entity_index_.end()) {
    Role& existing = entity_roles_[it->second.value];
    if (role != Role::kOther && existing != role) {
      if (existing != Role::kOther) {
        throw Error(ErrorCode::kRoleConflict,
                    "entity '" + std::string(label) + "' is tagged " +
                        std::string(RoleName(existing)) + ", not " +
                        std::string(RoleName(role)));
      }
      existing = role;
    }
    return it->second;
  }
  const EntityId id{static_cast<uint32_t>(entity_labels_.size())};
  entity_labels_.emplace_back(label);
  entity_roles_.push_back(role);
  entity_index_.emplace(std::string(label), id);
  return id;
}

RelationId KnowledgeGraph::InternRelation(std::string_view label) {
  if (label.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty relation label");
  }
  if (auto it = relation_index_.find(std::string(label));
      it != relation_index_.end()) {
    return it->second;
  }
  const RelationId id{static_cast<uint32_t>(relation_labels_.size())};
  relation_labels_.emplace_back(label);
  relation_index_.emplace(std::string(label), id);
  tails_by_relation_.emplace_back();
  return id;
}

bool KnowledgeGraph::AddTriple(const Triple& triple) {
  if (triple.head.value >= num_entities() ||
      triple.tail.value >= num_entities() ||
      triple.relation.value >= num_relations()) {
    throw Error(ErrorCode::kInvalidArgument, "triple references unknown id");
  }
  if (!triple_set_.insert(triple).second) return false;
  triples_.push_back(triple);
  tails_by_head_[Key(triple.head, triple.relation)].push_back(triple.tail);
  auto& tails = tails_by_relation_[triple.relation.value];
  auto pos = std::lower_bound(tails.begin(), tails.end(), triple.tail);
  if (pos == tails.end() || *pos != triple.tail) tails.insert(pos, triple.tail);
  return true;
}

bool KnowledgeGraph::AddTriple(std::string_view head, std::string_view relation,
                               std::string_view tail) {
  const EndpointRoles roles = RolesForRelation(relation);
  const EntityId h = InternEntity(head, roles.head);
  const RelationId r = InternRelation(relation);
  const EntityId t = InternEntity(tail, roles.tail);
  return AddTriple(Triple{h, r, t});
}

std::optional<EntityId> KnowledgeGraph::FindEntity(std::string_view label) const {
  auto it = entity_index_.find(std::string(label));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::FindRelation(
    std::string_view label) const {
  auto it = relation_index_.find(std::string(label));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

RelationId KnowledgeGraph::RelationOrDie(std::string_view label) const {
  auto id = FindRelation(label);
  if (!id) {
    throw Error(ErrorCode::kNotFound,
                "unknown relation '" + std::string(label) + "'");
  }
  return *id;
}

const std::string& KnowledgeGraph::EntityLabel(EntityId id) const {
  if (id.value >= entity_labels_.size()) {
    throw Error(ErrorCode::kNotFound, "entity id out of range");
  }
  return entity_labels_[id.value];
}

const std::string& KnowledgeGraph::RelationLabel(RelationId id) const {
  if (id.value >= relation_labels_.size()) {
    throw Error(ErrorCode::kNotFound, "relation id out of range");
  }
  return relation_labels_[id.value];
}

Role KnowledgeGraph::EntityRole(EntityId id) const {
  if (id.value >= entity_roles_.size()) {
    throw Error(ErrorCode::kNotFound, "entity id out of range");
  }
  return entity_roles_[id.value];
}

bool KnowledgeGraph::Contains(const Triple& triple) const {
  return triple_set_.contains(triple);
}

std::span<const EntityId> KnowledgeGraph::CandidateTails(
    RelationId relation) const {
  if (relation.value >= tails_by_relation_.size()) {
    throw Error(ErrorCode::kNotFound, "unknown relation id");
  }
  return tails_by_relation_[relation.value];
}

std::span<const EntityId> KnowledgeGraph::Tails(EntityId head,
                                                RelationId relation) const {
  auto it = tails_by_head_.find(Key(head, relation));
  if (it == tails_by_head_.end()) return {};
  return it->second;
}

std::vector<EntityId> KnowledgeGraph::EntitiesWithRole(Role role) const {
  std::vector<EntityId> out;
  for (uint32_t i = 0; i < entity_roles_.size(); ++i) {
    if (entity_roles_[i] == role) out.push_back(EntityId{i});
  }
  return out;
}

KnowledgeGraph KnowledgeGraph::CloneVocabulary() const {
  KnowledgeGraph copy;
  copy.entity_labels_ = entity_labels_;
  copy.entity_roles_ = entity_roles_;
  copy.entity_index_ = entity_index_;
  copy.relation_labels_ = relation_labels_;
  copy.relation_index_ = relation_index_;
  copy.tails_by_relation_.resize(relation_labels_.size());
  return copy;
}

void WriteTriples(const KnowledgeGraph& graph, std::ostream& out) {
  for (const Triple& t : graph.triples()) {
    out << graph.EntityLabel(t.head) << '\t' << graph.RelationLabel(t.relation)
        << '\t' << graph.EntityLabel(t.tail) << '\n';
  }
}

bool EquivalentGraphs(const KnowledgeGraph& a, const KnowledgeGraph& b) {
  if (a.num_triples() != b.num_triples() ||
      a.num_entities() != b.num_entities() ||
      a.num_relations() != b.num_relations()) {
    return false;
  }
  auto entities = [](const KnowledgeGraph& g) {
    std::map<std::string, Role> out;
    for (uint32_t i = 0; i < g.num_entities(); ++i) {
      out.emplace(g.EntityLabel(EntityId{i}), g.EntityRole(EntityId{i}));
    }
    return out;
  };
  auto relation_labels = [](const KnowledgeGraph& g) {
    std::set<std::string> out;
    for (uint32_t i = 0; i < g.num_relations(); ++i) {
      out.insert(g.RelationLabel(RelationId{i}));
    }
    return out;
  };
  auto triple_labels = [](const KnowledgeGraph& g) {
    std::multiset<std::tuple<std::string, std::string, std::string>> out;
    for (const Triple& t : g.triples()) {
      out.emplace(g.EntityLabel(t.head), g.RelationLabel(t.relation),
                  g.EntityLabel(t.tail));
    }
    return out;
  };
  return entities(a) == entities(b) &&
         relation_labels(a) == relation_labels(b) &&
         triple_labels(a) == triple_labels(b);
}

Split SplitInteractions(const KnowledgeGraph& graph, RelationId relation,
                        double holdout_fraction, uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "holdout fraction must lie in (0, 1)");
  }
  if (relation.value >= graph.num_relations()) {
    throw Error(ErrorCode::kNotFound, "unknown relation id");
  }

  // Interaction triple indices per user, users in ascending id order.
  std::map<EntityId, std::vector<size_t>> by_user;
  const auto triples = graph.triples();
  for (size_t i = 0; i < triples.size(); ++i) {
    if (triples[i].relation == relation) by_user[triples[i].head].push_back(i);
  }

  Split split;
  split.seed = seed;
  std::vector<bool> held(triples.size(), false);
  const uint64_t base = DeriveSeed(seed, "split");
  for (auto& [user, indices] : by_user) {
    const size_t n = indices.size();
    if (n < 2) {
      split.single_interaction_users.push_back(user);
      continue;
    }
    size_t count = static_cast<size_t>(
        std::floor(holdout_fraction * static_cast<double>(n)));
    count = std::min(count, n - 1);
    Rng rng(UserSeed(base, user.value));
    Shuffle(std::span<size_t>(indices), rng);
    for (size_t k = 0; k < count; ++k) held[indices[k]] = true;
  }

  split.train = graph.CloneVocabulary();
  for (size_t i = 0; i < triples.size(); ++i) {
    if (held[i]) {
      split.held_out.push_back(triples[i]);
    } else {
      split.train.AddTriple(triples[i]);
    }
  }
  return split;
}

}  // namespace kgepb
