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
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "kgepb/error.h"
#include "kgepb/ingest.h"
#include "test_util.h"

namespace kgepb {
namespace {

TEST_CASE("interning") {
  KnowledgeGraph g;
  CHECK(g.InternEntity("user_1", Role::kUser) == EntityId{0});
  CHECK(g.InternEntity("user_1", Role::kUser) == EntityId{0});
  CHECK(g.InternEntity("movie_1", Role::kItem) == EntityId{1});
  CHECK(g.EntityLabel(EntityId{1}) == "movie_1");
  CHECK(g.EntityRole(EntityId{1}) == Role::kItem);
  CHECK(g.FindEntity("movie_1") == EntityId{1});
  CHECK_FALSE(g.FindEntity("movie_2").has_value());

  SUBCASE("role conflicts are rejected") {
    try {
      g.InternEntity("user_1", Role::kItem);
      FAIL("expected a role conflict");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kRoleConflict);
    }
  }
  SUBCASE("an untyped entity takes the first specific role") {
    const EntityId x = g.InternEntity("x", Role::kOther);
    CHECK(g.InternEntity("x", Role::kItem) == x);
    CHECK(g.EntityRole(x) == Role::kItem);
    CHECK(g.InternEntity("x", Role::kOther) == x);
    CHECK(g.EntityRole(x) == Role::kItem);
  }
  SUBCASE("empty labels are rejected") {
    CHECK_THROWS_AS(g.InternEntity("", Role::kUser), Error);
    CHECK_THROWS_AS(g.InternRelation(""), Error);
  }
}

TEST_CASE("label round trip and dense ids") {
  KnowledgeGraph g;
  for (int i = 0; i < 50; ++i) {
    g.InternEntity("e" + std::to_string(i), i % 2 ? Role::kItem : Role::kUser);
  }
  for (uint32_t i = 0; i < g.num_entities(); ++i) {
    CHECK(g.FindEntity(g.EntityLabel(EntityId{i})) == EntityId{i});
  }
  CHECK(g.EntitiesWithRole(Role::kItem).size() == 25);
}

TEST_CASE("triples, schema roles and indices") {
  KnowledgeGraph g;
  CHECK(g.AddTriple("user_1", "hasGender", "male"));
  CHECK_FALSE(g.AddTriple("user_1", "hasGender", "male"));
  CHECK(g.AddTriple("user_2", "hasGender", "female"));
  CHECK(g.AddTriple("user_1", "interactedWith", "movie_9"));
  CHECK(g.AddTriple("movie_9", "hasGenre", "genre_Drama"));
  CHECK(g.AddTriple("a", "likes", "b"));
  CHECK(g.num_triples() == 5);

  CHECK(g.EntityRole(*g.FindEntity("user_1")) == Role::kUser);
  CHECK(g.EntityRole(*g.FindEntity("movie_9")) == Role::kItem);
  CHECK(g.EntityRole(*g.FindEntity("male")) == Role::kAttributeValue);
  CHECK(g.EntityRole(*g.FindEntity("genre_Drama")) == Role::kAttributeValue);
  CHECK(g.EntityRole(*g.FindEntity("a")) == Role::kOther);

  const RelationId gender = g.RelationOrDie("hasGender");
  const auto values = g.CandidateTails(gender);
  REQUIRE(values.size() == 2);
  std::set<std::string> labels;
  for (EntityId v : values) labels.insert(g.EntityLabel(v));
  CHECK(labels == std::set<std::string>{"male", "female"});
  CHECK(g.CandidateTails(g.RelationOrDie("likes")).size() == 1);
  CHECK_THROWS_AS(g.RelationOrDie("hasAge"), Error);

  const auto tails = g.Tails(*g.FindEntity("user_1"), g.RelationOrDie("interactedWith"));
  REQUIRE(tails.size() == 1);
  CHECK(g.EntityLabel(tails[0]) == "movie_9");
  CHECK(g.Tails(*g.FindEntity("user_2"), g.RelationOrDie("interactedWith")).empty());
  CHECK(g.Contains(g.triples()[0]));
  CHECK_THROWS_AS(g.AddTriple(Triple{EntityId{99}, gender, EntityId{0}}), Error);
}

TEST_CASE("distinct tails per relation match the triple list") {
  const KnowledgeGraph g = testing::ToyInteractionGraph(
      5, 7, {{0, 1}, {1, 2, 6}, {}, {3}, {0, 6}});
  for (uint32_t r = 0; r < g.num_relations(); ++r) {
    std::set<EntityId> observed;
    for (const Triple& t : g.triples()) {
      if (t.relation.value == r) observed.insert(t.tail);
    }
    const auto tails = g.CandidateTails(RelationId{r});
    CHECK(std::set<EntityId>(tails.begin(), tails.end()) == observed);
    CHECK(std::is_sorted(tails.begin(), tails.end()));
  }
}

TEST_CASE("serialization round trip") {
  KnowledgeGraph g;
  g.AddTriple("user_1", "hasGender", "male");
  g.AddTriple("user_1", "interactedWith", "movie_3");
  g.AddTriple("user_2", "interactedWith", "movie_3");
  g.AddTriple("movie_3", "hasGenre", "genre_Comedy");
  std::stringstream buffer;
  WriteTriples(g, buffer);
  const KnowledgeGraph back = ReadTriples(buffer, "buffer");
  CHECK(EquivalentGraphs(g, back));
  CHECK(back.num_entities() == g.num_entities());

  KnowledgeGraph other = back;
  other.AddTriple("user_2", "hasGender", "female");
  CHECK_FALSE(EquivalentGraphs(g, other));
}

TEST_CASE("interaction split") {
  const KnowledgeGraph g = testing::ToyInteractionGraph(
      4, 10, {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {0, 1}, {5}, {2, 3, 4, 5, 6}});
  const RelationId rel = g.RelationOrDie("interactedWith");

  SUBCASE("counts are per-user floors and every user keeps one triple") {
    const Split split = SplitInteractions(g, rel, 0.2, 1);
    CHECK(split.held_out.size() == 2 + 0 + 0 + 1);
    CHECK(split.single_interaction_users.size() == 1);
    CHECK(split.train.num_triples() + split.held_out.size() == g.num_triples());
    for (const Triple& t : split.held_out) CHECK_FALSE(split.train.Contains(t));
  }
  SUBCASE("near-total holdout still leaves one training triple") {
    const KnowledgeGraph two = testing::ToyInteractionGraph(1, 2, {{0, 1}});
    const Split split = SplitInteractions(two, rel, 0.999, 4);
    CHECK(split.held_out.size() == 1);
    CHECK(split.train.num_triples() == 1);
  }
  SUBCASE("deterministic given the seed") {
    CHECK(SplitInteractions(g, rel, 0.5, 3).held_out ==
          SplitInteractions(g, rel, 0.5, 3).held_out);
  }
  SUBCASE("bad fractions") {
    CHECK_THROWS_AS(SplitInteractions(g, rel, 0.0, 1), Error);
    CHECK_THROWS_AS(SplitInteractions(g, rel, 1.0, 1), Error);
  }
}

TEST_CASE("MovieLens split matches a per-user recount" *
          doctest::skip(!std::filesystem::exists(KGEPB_MOVIELENS_DIR "/u.data"))) {
  // Count distinct (user, movie) pairs straight from u.data.
  std::ifstream in(std::filesystem::path(KGEPB_MOVIELENS_DIR) / "u.data");
  std::map<std::string, std::set<std::string>> per_user;
  std::string user, movie, rest;
  while (in >> user >> movie) {
    std::getline(in, rest);
    per_user[user].insert(movie);
  }
  size_t expected = 0, total = 0;
  for (const auto& [u, movies] : per_user) {
    expected += movies.size() / 5;  // floor(0.2 n) for integer n
    total += movies.size();
  }

  const KnowledgeGraph g = LoadMovieLens(KGEPB_MOVIELENS_DIR);
  const RelationId rel = g.RelationOrDie("interactedWith");
  const Split split = SplitInteractions(g, rel, 0.2, 17);
  CHECK(split.held_out.size() == expected);
  size_t train_interactions = 0;
  for (const Triple& t : split.train.triples()) train_interactions += t.relation == rel;
  CHECK(train_interactions + split.held_out.size() == total);
  CHECK(split.train.num_triples() + split.held_out.size() == g.num_triples());
  CHECK(SplitInteractions(g, rel, 0.2, 17).held_out == split.held_out);
}

}  // namespace
}  // namespace kgepb
