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

#include "kgepb/ingest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "kgepb/error.h"
#include "test_util.h"

namespace kgepb {
namespace {

namespace fs = std::filesystem;

const char kUsers[] =
    "1|24|M|technician|85711\n"
    "2|53|F|other|94043\n"
    "3|17|M|student|32067\n";

std::string ItemRow(int id, int genre) {
  std::string row = std::to_string(id) + "|Film " + std::to_string(id) +
                    " (1995)|01-Jan-1995||http://x";
  for (int g = 0; g < 19; ++g) row += g == genre ? "|1" : "|0";
  return row + "\n";
}

void WriteMiniMovieLens(const fs::path& dir, const std::string& ratings) {
  testing::WriteFile(dir / "u.user", kUsers);
  testing::WriteFile(dir / "u.item", ItemRow(1, 1) + ItemRow(2, 8) + ItemRow(3, 14));
  testing::WriteFile(dir / "u.data", ratings);
}

size_t CountRelation(const KnowledgeGraph& g, std::string_view name) {
  const auto rel = g.FindRelation(name);
  if (!rel) return 0;
  size_t n = 0;
  for (const Triple& t : g.triples()) n += t.relation == *rel;
  return n;
}

TEST_CASE("labels") {
  CHECK(UserLabel("7") == "user_7");
  CHECK(MovieLabel("12") == "movie_12");
  CHECK(AgeGroupLabel(7) == "age_under18");
  CHECK(AgeGroupLabel(18) == "age_18-24");
  CHECK(AgeGroupLabel(34) == "age_25-34");
  CHECK(AgeGroupLabel(45) == "age_45-49");
  CHECK(AgeGroupLabel(55) == "age_50-55");
  CHECK(AgeGroupLabel(56) == "age_56plus");
}

TEST_CASE("mini MovieLens") {
  testing::TempDir dir;
  SUBCASE("schema and dedup") {
    WriteMiniMovieLens(dir.path(),
                       "1\t1\t5\t881250949\n"
                       "1\t1\t3\t881250950\n"
                       "2\t3\t4\t881250951\n"
                       "3\t2\t1\t881250952\n");
    const KnowledgeGraph g = LoadMovieLens(dir.path());
    CHECK(g.EntitiesWithRole(Role::kUser).size() == 3);
    CHECK(g.EntitiesWithRole(Role::kItem).size() == 3);
    CHECK(g.FindEntity("user_1") == EntityId{0});
    CHECK(g.FindEntity("movie_1") == EntityId{3});
    CHECK(CountRelation(g, "interactedWith") == 3);
    CHECK(CountRelation(g, "hasGender") == 3);
    CHECK(CountRelation(g, "hasAgeGroup") == 3);
    CHECK(CountRelation(g, "hasOccupation") == 3);
    CHECK(CountRelation(g, "hasGenre") == 3);
    const EntityId user2 = *g.FindEntity("user_2");
    const auto age = g.Tails(user2, g.RelationOrDie("hasAgeGroup"));
    REQUIRE(age.size() == 1);
    CHECK(g.EntityLabel(age[0]) == "age_50-55");
    const auto genre = g.Tails(*g.FindEntity("movie_2"), g.RelationOrDie("hasGenre"));
    REQUIRE(genre.size() == 1);
    CHECK(g.EntityLabel(genre[0]) == "genre_Drama");
    CHECK(g.EntityRole(*g.FindEntity("occupation_student")) == Role::kAttributeValue);
  }
  SUBCASE("empty ratings give attributes only") {
    WriteMiniMovieLens(dir.path(), "");
    const KnowledgeGraph g = LoadMovieLens(dir.path());
    CHECK(CountRelation(g, "interactedWith") == 0);
    CHECK(g.num_triples() == 9 + 3);
  }
  SUBCASE("malformed rating row names the line") {
    WriteMiniMovieLens(dir.path(), "1\t1\t5\t0\n2\t3\t4\n");
    try {
      LoadMovieLens(dir.path());
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find("u.data:2") != std::string::npos);
    }
  }
  SUBCASE("unknown movie id") {
    WriteMiniMovieLens(dir.path(), "1\t99\t5\t0\n");
    try {
      LoadMovieLens(dir.path());
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("unknown movie id 99") != std::string::npos);
    }
  }
  SUBCASE("missing files") {
    CHECK_THROWS_AS(LoadMovieLens(dir.path() / "nope"), Error);
    CHECK_THROWS_AS(DetectDataset(dir.path()), Error);
  }
}

TEST_CASE("TSV triples") {
  testing::TempDir dir;
  const fs::path path = dir.path() / "g.tsv";
  SUBCASE("three distinct lines") {
    testing::WriteFile(path, "# comment\na\tr\tb\nb\tr\tc\r\na\ts\tc\n");
    CHECK(LoadTsv(path).num_triples() == 3);
    CHECK(DetectDataset(path).kind == DatasetKind::kGenericTsv);
  }
  SUBCASE("duplicated lines collapse") {
    testing::WriteFile(path, "a\tr\tb\na\tr\tb\n");
    CHECK(LoadTsv(path).num_triples() == 1);
  }
  SUBCASE("wrong field count names the line") {
    testing::WriteFile(path, "a\tr\tb\na\tr\n");
    try {
      LoadTsv(path);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
  }
}

TEST_CASE("synthetic MovieLens exports and reloads identically") {
  testing::TempDir dir;
  testing::WriteSyntheticMovieLens(dir.path(), {});
  const KnowledgeGraph g = LoadDataset(DetectDataset(dir.path()));
  std::ofstream(dir.path() / "graph.tsv") << [&] {
    std::ostringstream out;
    WriteTriples(g, out);
    return out.str();
  }();
  CHECK(EquivalentGraphs(g, LoadTsv(dir.path() / "graph.tsv")));
  CHECK(LoadMovieLens(dir.path()).triples().size() == g.num_triples());
}

#define REQUIRE_MOVIELENS \
  doctest::skip(!fs::exists(KGEPB_MOVIELENS_DIR "/u.data"))

TEST_CASE("MovieLens 100K against raw-file scans" * REQUIRE_MOVIELENS) {
  const fs::path root = KGEPB_MOVIELENS_DIR;
  std::set<std::string> occupations, movie_ids;
  size_t user_rows = 0, genre_flags = 0, rating_rows = 0;
  std::string line;
  {
    std::ifstream in(root / "u.user");
    while (std::getline(in, line)) {
      ++user_rows;
      std::istringstream row(line);
      std::string field;
      for (int i = 0; i < 4; ++i) std::getline(row, field, '|');
      occupations.insert(field);
    }
  }
  {
    std::ifstream in(root / "u.item", std::ios::binary);
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string field;
      std::getline(row, field, '|');
      movie_ids.insert(field);
      for (int i = 1; i < 5; ++i) std::getline(row, field, '|');
      while (std::getline(row, field, '|')) genre_flags += field == "1";
    }
  }
  {
    std::ifstream in(root / "u.data");
    while (std::getline(in, line)) rating_rows += !line.empty();
  }

  const KnowledgeGraph g = LoadMovieLens(root);
  const auto users = g.EntitiesWithRole(Role::kUser);
  const auto items = g.EntitiesWithRole(Role::kItem);
  CHECK(users.size() == user_rows);
  CHECK(items.size() == movie_ids.size());
  CHECK(rating_rows == 100000);
  CHECK(items.front() == EntityId{static_cast<uint32_t>(user_rows)});
  CHECK(items.back() == EntityId{static_cast<uint32_t>(user_rows + movie_ids.size() - 1)});
  CHECK(g.CandidateTails(g.RelationOrDie("hasOccupation")).size() == occupations.size());
  CHECK(occupations.size() == 21);
  CHECK(CountRelation(g, "hasGenre") == genre_flags);
  CHECK(CountRelation(g, "interactedWith") <= rating_rows);
  CHECK(g.CandidateTails(g.RelationOrDie("hasGender")).size() == 2);
  for (const char* rel : {"hasGender", "hasAgeGroup", "hasOccupation"}) {
    for (EntityId u : users) CHECK(g.Tails(u, g.RelationOrDie(rel)).size() == 1);
  }
  CHECK(EquivalentGraphs(g, LoadMovieLens(root)));
}

}  // namespace
}  // namespace kgepb
