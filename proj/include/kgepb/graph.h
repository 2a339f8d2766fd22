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

#ifndef KGEPB_GRAPH_H_
#define KGEPB_GRAPH_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kgepb {

struct EntityId {
  uint32_t value = 0;
  friend auto operator<=>(EntityId, EntityId) = default;
};

struct RelationId {
  uint32_t value = 0;
  friend auto operator<=>(RelationId, RelationId) = default;
};

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// kOther is the weak role: it never conflicts, and an entity first seen as
// kOther takes the first specific role it is later interned with.
enum class Role : uint8_t { kUser, kItem, kAttributeValue, kOther };

std::string_view RoleName(Role role);

// Relation names of the fixed recommender schema.
namespace relations {
inline constexpr std::string_view kInteractedWith = "interactedWith";
inline constexpr std::string_view kRecommended = "recommended";
inline constexpr std::string_view kHasGender = "hasGender";
inline constexpr std::string_view kHasAgeGroup = "hasAgeGroup";
inline constexpr std::string_view kHasOccupation = "hasOccupation";
inline constexpr std::string_view kHasGenre = "hasGenre";
}  // namespace relations

struct EndpointRoles {
  Role head;
  Role tail;
};

// Roles implied by the schema for a relation name; unknown relations tag
// both ends kOther.
EndpointRoles RolesForRelation(std::string_view relation);

// A deduplicated fact set with interned vocabularies. Built by a single
// writer; read-only access is safe from any number of threads.
class KnowledgeGraph {
 public:
  // Returns the existing id for a known label. Fails with kRoleConflict when
  // the label is already bound to a different specific role.
  EntityId InternEntity(std::string_view label, Role role);
  RelationId InternRelation(std::string_view label);

  // Returns false when the triple was already present.
  bool AddTriple(const Triple& triple);
  // Interns all three labels, assigning entity roles from the schema.
  bool AddTriple(std::string_view head, std::string_view relation,
                 std::string_view tail);

  std::optional<EntityId> FindEntity(std::string_view label) const;
  std::optional<RelationId> FindRelation(std::string_view label) const;
  // Like FindRelation but fails with kNotFound.
  RelationId RelationOrDie(std::string_view label) const;

  const std::string& EntityLabel(EntityId id) const;
  const std::string& RelationLabel(RelationId id) const;
  Role EntityRole(EntityId id) const;

  size_t num_entities() const { return entity_labels_.size(); }
  size_t num_relations() const { return relation_labels_.size(); }
  size_t num_triples() const { return triples_.size(); }
  std::span<const Triple> triples() const { return triples_; }

  bool Contains(const Triple& triple) const;

  // Distinct tails observed with `relation`, ascending by id.
  std::span<const EntityId> CandidateTails(RelationId relation) const;

  // Tails of (head, relation, ?) in insertion order.
  std::span<const EntityId> Tails(EntityId head, RelationId relation) const;

  // All entities with the given role, ascending by id.
  std::vector<EntityId> EntitiesWithRole(Role role) const;

  // Same vocabularies, no triples.
  KnowledgeGraph CloneVocabulary() const;

 private:
  uint64_t Key(EntityId head, RelationId relation) const {
    return (static_cast<uint64_t>(head.value) << 32) | relation.value;
  }
  struct TripleHash {
    size_t operator()(const Triple& t) const;
  };

  std::vector<std::string> entity_labels_;
  std::vector<Role> entity_roles_;
  std::unordered_map<std::string, EntityId> entity_index_;
  std::vector<std::string> relation_labels_;
  std::unordered_map<std::string, RelationId> relation_index_;

  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> triple_set_;
  std::unordered_map<uint64_t, std::vector<EntityId>> tails_by_head_;
  std::vector<std::vector<EntityId>> tails_by_relation_;
};

// Canonical triple file: `head<TAB>relation<TAB>tail` per line, `#` lines are
// comments. Triples are written in insertion order.
void WriteTriples(const KnowledgeGraph& graph, std::ostream& out);

// Label-level equality: same triples, same entity labels with the same
// roles, same relation labels. Ids may differ.
bool EquivalentGraphs(const KnowledgeGraph& a, const KnowledgeGraph& b);

struct Split {
  KnowledgeGraph train;
  std::vector<Triple> held_out;
  uint64_t seed = 0;
  // Users with a single interaction; they stay entirely in train.
  std::vector<EntityId> single_interaction_users;
};

// Per-user holdout of `relation` triples: floor(fraction * n_u) interactions
// are held out, capped so every user keeps at least one in train. All other
// triples stay in train.
Split SplitInteractions(const KnowledgeGraph& graph, RelationId relation,
                        double holdout_fraction, uint64_t seed);

}  // namespace kgepb

#endif  // KGEPB_GRAPH_H_
