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

#include "test_util.h"

#include <fstream>
#include <numbers>
#include <sstream>

#include "kgepb/random.h"

namespace kgepb::testing {

TempDir::TempDir() {
  static int counter = 0;
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("kgepb_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

void WriteSyntheticMovieLens(const std::filesystem::path& dir,
                             const SyntheticMovieLens& spec) {
  std::filesystem::create_directories(dir);
  Rng rng(spec.seed);
  static const char* kOccupations[] = {"student", "engineer", "writer"};
  std::vector<bool> male(spec.users);
  {
    std::ofstream out(dir / "u.user");
    for (size_t u = 0; u < spec.users; ++u) {
      male[u] = u % 2 == 0;
      out << u + 1 << '|' << 15 + rng.Uniform(50) << '|' << (male[u] ? 'M' : 'F')
          << '|' << kOccupations[rng.Uniform(3)] << "|0000" << u << '\n';
    }
  }
  const size_t half = spec.movies / 2;
  {
    std::ofstream out(dir / "u.item");
    for (size_t m = 0; m < spec.movies; ++m) {
      out << m + 1 << "|Movie " << m + 1 << " (1995)|01-Jan-1995||http://x|0";
      for (int g = 1; g < 19; ++g) {
        const bool action = g == 1 && m < half;
        const bool romance = g == 14 && m >= half;
        out << '|' << (action || romance ? 1 : 0);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "u.data");
    for (size_t u = 0; u < spec.users; ++u) {
      for (size_t i = 0; i < spec.ratings_per_user; ++i) {
        const bool preferred = rng.UniformReal() < spec.gender_affinity;
        const bool first_half = male[u] == preferred;
        const size_t m = first_half ? rng.Uniform(half) : half + rng.Uniform(spec.movies - half);
        out << u + 1 << '\t' << m + 1 << '\t' << 1 + rng.Uniform(5) << '\t'
            << 880000000 + u * 100 + i << '\n';
      }
    }
  }
}

EmbeddingModel RandomModel(const ModelShape& shape, size_t num_entities,
                           size_t num_relations, uint64_t seed) {
  EmbeddingModel model(shape, num_entities, num_relations);
  Rng rng(seed);
  for (double& x : model.mutable_entity_table()) x = rng.UniformReal(-1.0, 1.0);
  for (double& x : model.mutable_relation_table()) {
    x = shape.kind == ModelKind::kRotatE ? rng.UniformReal(0.0, 2 * std::numbers::pi)
                                         : rng.UniformReal(-1.0, 1.0);
  }
  return model;
}

KnowledgeGraph ToyInteractionGraph(size_t users, size_t items,
                                   const std::vector<std::vector<int>>& links) {
  KnowledgeGraph g;
  for (size_t u = 0; u < users; ++u) g.InternEntity("u" + std::to_string(u), Role::kUser);
  for (size_t i = 0; i < items; ++i) g.InternEntity("i" + std::to_string(i), Role::kItem);
  g.InternRelation(relations::kInteractedWith);
  for (size_t u = 0; u < links.size(); ++u) {
    for (int i : links[u]) {
      g.AddTriple("u" + std::to_string(u), relations::kInteractedWith,
                  "i" + std::to_string(i));
    }
  }
  return g;
}

}  // namespace kgepb::testing
