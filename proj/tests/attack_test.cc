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
#include <set>

#include "doctest.h"
#include "kgepb/error.h"
#include "kgepb/ingest.h"
#include "kgepb/random.h"
#include "test_util.h"

namespace kgepb {
namespace {

std::vector<EntityId> Users(const KnowledgeGraph& g) {
  return g.EntitiesWithRole(Role::kUser);
}

TEST_CASE("attack user split") {
  std::vector<EntityId> users;
  for (uint32_t i = 0; i < 943; ++i) users.push_back(EntityId{i});
  const UserPartition p = SplitAttackUsers(users, 0.1, 5);
  CHECK(p.target.size() == 94);
  CHECK(p.known.size() == 849);
  std::set<EntityId> all(p.known.begin(), p.known.end());
  for (EntityId u : p.target) CHECK(all.insert(u).second);
  CHECK(all.size() == 943);
  CHECK(SplitAttackUsers(users, 0.1, 5).target == p.target);
  CHECK(SplitAttackUsers(users, 0.1, 6).target != p.target);
  CHECK_THROWS_AS(SplitAttackUsers(users, 0.0, 5), Error);
  CHECK_THROWS_AS(SplitAttackUsers(std::span(users).first(3), 0.1, 5), Error);
}

// Users u0..u{n-1} with alternating gender; each recommended the given items.
KnowledgeGraph GenderGraph(size_t users, size_t items) {
  KnowledgeGraph g;
  for (size_t u = 0; u < users; ++u) {
    g.AddTriple("user_" + std::to_string(u), relations::kHasGender,
                u % 2 ? "female" : "male");
  }
  for (size_t m = 0; m < items; ++m) {
    g.AddTriple("movie_" + std::to_string(m), relations::kHasGenre,
                m % 2 ? "genre_Romance" : "genre_Action");
  }
  return g;
}

EntityId U(const KnowledgeGraph& g, int i) {
  return *g.FindEntity("user_" + std::to_string(i));
}

std::vector<ReleasedList> ReleasedFrom(const KnowledgeGraph& g,
                                       const std::vector<std::vector<int>>& items) {
  std::vector<ReleasedList> out;
  for (size_t u = 0; u < items.size(); ++u) {
    ReleasedList list{*g.FindEntity("user_" + std::to_string(u)), {}};
    for (int m : items[u]) list.items.push_back(*g.FindEntity("movie_" + std::to_string(m)));
    out.push_back(std::move(list));
  }
  return out;
}

TEST_CASE("attack graph contents") {
  SUBCASE("one known user with five items and no aux gives six triples") {
    const KnowledgeGraph g = GenderGraph(1, 5);
    AttackSetup setup;
    setup.aux_genres = false;
    const UserPartition partition{{*g.FindEntity("user_0")}, {}};
    const AttackGraph a =
        BuildAttackGraph(ReleasedFrom(g, {{0, 1, 2, 3, 4}}), g, setup, partition);
    CHECK(a.graph.num_triples() == 6);
  }
  SUBCASE("targets contribute only recommended triples") {
    const KnowledgeGraph g = GenderGraph(4, 6);
    AttackSetup setup;
    const UserPartition partition{{U(g, 0), U(g, 1), U(g, 2)}, {U(g, 3)}};
    const AttackGraph a = BuildAttackGraph(
        ReleasedFrom(g, {{0, 1}, {2}, {3, 4}, {5, 0}}), g, setup, partition);
    CHECK(a.graph.num_triples() == 7 + 3 + 6);
    const EntityId target = *a.graph.FindEntity("user_3");
    for (const Triple& t : a.graph.triples()) {
      if (t.head == target) CHECK(a.graph.RelationLabel(t.relation) == "recommended");
      CHECK(a.graph.RelationLabel(t.relation) != "interactedWith");
    }
    std::set<std::string> values;
    for (EntityId v : a.candidate_values) values.insert(a.graph.EntityLabel(v));
    CHECK(values == std::set<std::string>{"male", "female"});
  }
  SUBCASE("list order does not change the attack graph") {
    const KnowledgeGraph g = GenderGraph(2, 6);
    AttackSetup setup;
    const UserPartition partition{{U(g, 0)}, {U(g, 1)}};
    const AttackGraph a =
        BuildAttackGraph(ReleasedFrom(g, {{0, 1, 2}, {5, 3}}), g, setup, partition);
    const AttackGraph b =
        BuildAttackGraph(ReleasedFrom(g, {{2, 0, 1}, {3, 5}}), g, setup, partition);
    CHECK(std::equal(a.graph.triples().begin(), a.graph.triples().end(),
                     b.graph.triples().begin(), b.graph.triples().end()));
  }
}

TEST_CASE("leak guard") {
  const KnowledgeGraph g = GenderGraph(3, 2);
  AttackSetup setup;
  const UserPartition partition{{U(g, 0), U(g, 1)}, {U(g, 2)}};
  AttackGraph a = BuildAttackGraph(ReleasedFrom(g, {{0}, {1}, {0, 1}}), g, setup, partition);
  CHECK_NOTHROW(CheckNoLeak(a, g, partition.target));
  a.graph.AddTriple("user_2", "hasGender", "male");
  try {
    CheckNoLeak(a, g, partition.target);
    FAIL("expected the leak guard to fire");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLeak);
  }
}

TEST_CASE("success rate") {
  const std::vector<UserInference> all_right(4, UserInference{{}, {}, {}, true});
  CHECK(AttackSuccessRate(all_right) == 1.0);
  CHECK_THROWS_AS(AttackSuccessRate({}), Error);

  // A coin-flip predictor on balanced labels.
  double sum = 0.0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    std::vector<UserInference> guesses(1000);
    for (size_t i = 0; i < guesses.size(); ++i) {
      guesses[i].success = rng.Uniform(2) == i % 2;
    }
    sum += AttackSuccessRate(guesses);
  }
  CHECK(std::abs(sum / 5 - 0.5) <= 0.05);
}

TEST_CASE("attack on a graph where items reveal gender") {
  // Even (male) users get even items, odd (female) users odd items.
  const size_t num_users = 40, num_items = 20;
  const KnowledgeGraph g = GenderGraph(num_users, num_items);
  std::vector<std::vector<int>> items(num_users);
  for (size_t u = 0; u < num_users; ++u) {
    for (int k = 0; k < 4; ++k) items[u].push_back(static_cast<int>((u % 2) + 2 * ((u / 2 + k) % 10)));
  }
  AttackSetup setup;
  setup.aux_genres = false;
  setup.train.dim = 8;
  setup.train.epochs = 60;
  setup.train.batch_size = 16;
  setup.train.learning_rate = 0.5;
  setup.train.margin = 2.0;
  setup.seed = 4;
  const UserPartition partition = SplitAttackUsers(Users(g), 0.1, 8);
  const AttackResult result = RunAttack(ReleasedFrom(g, items), g, setup, partition);
  REQUIRE(result.inferences.size() == 4);
  CHECK_FALSE(result.degenerate);
  for (const UserInference& inference : result.inferences) {
    CHECK(inference.ranking.size() == 2);
    CHECK(inference.ranking[0].score >= inference.ranking[1].score);
    CHECK(inference.success == (inference.ranking[0].entity == inference.true_value));
  }
  CHECK(result.success_rate == 1.0);
}

TEST_CASE("a single candidate value is degenerate") {
  KnowledgeGraph g;
  for (int u = 0; u < 10; ++u) {
    g.AddTriple("user_" + std::to_string(u), relations::kHasGender, "male");
    g.AddTriple("movie_" + std::to_string(u), relations::kHasGenre, "genre_Drama");
  }
  AttackSetup setup;
  setup.train.dim = 2;
  setup.train.epochs = 1;
  std::vector<std::vector<int>> items(10, std::vector<int>{0, 1});
  items[3] = {2, 3};
  const UserPartition partition = SplitAttackUsers(Users(g), 0.2, 1);
  const AttackResult result = RunAttack(ReleasedFrom(g, items), g, setup, partition);
  CHECK(result.degenerate);
  CHECK(result.success_rate == 1.0);
}

TEST_CASE("MovieLens attack graph triple count" *
          doctest::skip(!std::filesystem::exists(KGEPB_MOVIELENS_DIR "/u.data"))) {
  const KnowledgeGraph g = LoadMovieLens(KGEPB_MOVIELENS_DIR);
  const auto items = g.EntitiesWithRole(Role::kItem);
  std::vector<ReleasedList> released;
  for (EntityId u : Users(g)) {
    ReleasedList list{u, {}};
    for (size_t k = 0; k < 10; ++k) list.items.push_back(items[(u.value * 31 + k * 97) % items.size()]);
    released.push_back(std::move(list));
  }
  AttackSetup setup;
  const UserPartition partition = SplitAttackUsers(Users(g), 0.1, 2);
  const AttackGraph a = BuildAttackGraph(released, g, setup, partition);
  const RelationId genre = g.RelationOrDie("hasGenre");
  const size_t genre_triples = static_cast<size_t>(std::count_if(
      g.triples().begin(), g.triples().end(),
      [&](const Triple& t) { return t.relation == genre; }));
  CHECK(genre_triples == 2893);
  CHECK(a.graph.num_triples() == 10 * 943 + partition.known.size() + genre_triples);
  CHECK(a.candidate_values.size() == 2);
}

}  // namespace
}  // namespace kgepb
