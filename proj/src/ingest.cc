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

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "kgepb/error.h"

namespace kgepb {
namespace {

constexpr std::array<std::string_view, 19> kGenres = {
    "unknown", "Action",  "Adventure", "Animation", "Children's",
    "Comedy",  "Crime",   "Documentary", "Drama",   "Fantasy",
    "Film-Noir", "Horror", "Musical",   "Mystery",  "Romance",
    "Sci-Fi",  "Thriller", "War",      "Western"};

std::vector<std::string_view> SplitFields(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view StripCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::ifstream OpenOrDie(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

[[noreturn]] void Malformed(const std::filesystem::path& path, size_t line_no,
                            const std::string& what) {
  throw Error(ErrorCode::kParse, path.filename().string() + ":" +
                                     std::to_string(line_no) + ": " + what);
}

int ParseInt(std::string_view text, const std::filesystem::path& path,
             size_t line_no) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Malformed(path, line_no, "expected integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string UserLabel(std::string_view raw_id) {
  return "user_" + std::string(raw_id);
}

std::string MovieLabel(std::string_view raw_id) {
  return "movie_" + std::string(raw_id);
}

std::string AgeGroupLabel(int age) {
  if (age < 18) return "age_under18";
  if (age <= 24) return "age_18-24";
  if (age <= 34) return "age_25-34";
  if (age <= 44) return "age_35-44";
  if (age <= 49) return "age_45-49";
  if (age <= 55) return "age_50-55";
  return "age_56plus";
}

KnowledgeGraph LoadMovieLens(const std::filesystem::path& directory) {
  using namespace relations;
  KnowledgeGraph graph;
  std::string line;

  struct UserRow {
    std::string label, gender, age_group, occupation;
  };
  std::vector<UserRow> users;
  {
    const auto path = directory / "u.user";
    std::ifstream in = OpenOrDie(path);
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string_view row = StripCr(line);
      if (row.empty()) continue;
      const auto f = SplitFields(row, '|');
      if (f.size() != 5) {
        Malformed(path, line_no, "expected 5 fields, got " + std::to_string(f.size()));
      }
      std::string gender;
      if (f[2] == "M") {
        gender = "male";
      } else if (f[2] == "F") {
        gender = "female";
      } else {
        Malformed(path, line_no, "unknown gender '" + std::string(f[2]) + "'");
      }
      users.push_back({UserLabel(f[0]), gender,
                       AgeGroupLabel(ParseInt(f[1], path, line_no)),
                       "occupation_" + std::string(f[3])});
      graph.InternEntity(users.back().label, Role::kUser);
    }
  }

  struct MovieRow {
    std::string label;
    std::vector<std::string_view> genres;
  };
  std::vector<MovieRow> movies;
  {
    const auto path = directory / "u.item";
    std::ifstream in = OpenOrDie(path);
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string_view row = StripCr(line);
      if (row.empty()) continue;
      const auto f = SplitFields(row, '|');
      if (f.size() != 5 + kGenres.size()) {
        Malformed(path, line_no, "expected 24 fields, got " + std::to_string(f.size()));
      }
      MovieRow movie{MovieLabel(f[0]), {}};
      for (size_t g = 0; g < kGenres.size(); ++g) {
        const std::string_view flag = f[5 + g];
        if (flag == "1") {
          movie.genres.push_back(kGenres[g]);
        } else if (flag != "0") {
          Malformed(path, line_no, "genre flag must be 0 or 1");
        }
      }
      graph.InternEntity(movie.label, Role::kItem);
      movies.push_back(std::move(movie));
    }
  }

  for (const UserRow& u : users) {
    graph.AddTriple(u.label, kHasGender, u.gender);
    graph.AddTriple(u.label, kHasAgeGroup, u.age_group);
    graph.AddTriple(u.label, kHasOccupation, u.occupation);
  }
  for (const MovieRow& m : movies) {
    for (std::string_view genre : m.genres) {
      graph.AddTriple(m.label, kHasGenre, "genre_" + std::string(genre));
    }
  }

  {
    const auto path = directory / "u.data";
    std::ifstream in = OpenOrDie(path);
    const RelationId interacted = graph.InternRelation(kInteractedWith);
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string_view row = StripCr(line);
      if (row.empty()) continue;
      const auto f = SplitFields(row, '\t');
      if (f.size() != 4) {
        Malformed(path, line_no, "expected 4 fields, got " + std::to_string(f.size()));
      }
      const auto user = graph.FindEntity(UserLabel(f[0]));
      if (!user) Malformed(path, line_no, "unknown user id " + std::string(f[0]));
      const auto movie = graph.FindEntity(MovieLabel(f[1]));
      if (!movie) Malformed(path, line_no, "unknown movie id " + std::string(f[1]));
      graph.AddTriple(Triple{*user, interacted, *movie});
    }
  }
  return graph;
}

KnowledgeGraph ReadTriples(std::istream& in, std::string_view source_name) {
  KnowledgeGraph graph;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = StripCr(line);
    if (row.empty() || row.front() == '#') continue;
    const auto f = SplitFields(row, '\t');
    if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty()) {
      throw Error(ErrorCode::kParse,
                  std::string(source_name) + ":" + std::to_string(line_no) +
                      ": expected 3 tab-separated fields");
    }
    graph.AddTriple(f[0], f[1], f[2]);
  }
  return graph;
}

KnowledgeGraph LoadTsv(const std::filesystem::path& path) {
  std::ifstream in = OpenOrDie(path);
  return ReadTriples(in, path.filename().string());
}

KnowledgeGraph LoadDataset(const DatasetManifest& manifest) {
  switch (manifest.kind) {
    case DatasetKind::kMovieLens100K: return LoadMovieLens(manifest.path);
    case DatasetKind::kGenericTsv: return LoadTsv(manifest.path);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown dataset kind");
}

DatasetManifest DetectDataset(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    if (!std::filesystem::exists(path / "u.data")) {
      throw Error(ErrorCode::kNotFound,
                  path.string() + " has no u.data; not a MovieLens 100K directory");
    }
    return {DatasetKind::kMovieLens100K, path};
  }
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, path.string() + " does not exist");
  }
  return {DatasetKind::kGenericTsv, path};
}

}  // namespace kgepb
