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

#ifndef KGEPB_INGEST_H_
#define KGEPB_INGEST_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "kgepb/graph.h"

namespace kgepb {

enum class DatasetKind { kMovieLens100K, kGenericTsv };

struct DatasetManifest {
  DatasetKind kind = DatasetKind::kMovieLens100K;
  // Directory holding u.data/u.user/u.item, or a single triple file.
  std::filesystem::path path;
};

// Label helpers for the MovieLens schema.
std::string UserLabel(std::string_view raw_id);
std::string MovieLabel(std::string_view raw_id);
// Buckets: <18, 18-24, 25-34, 35-44, 45-49, 50-55, >=56.
std::string AgeGroupLabel(int age);

// Builds the recommender graph from u.user, u.item and u.data:
//   (user, interactedWith, movie) per distinct rating row,
//   (user, hasGender|hasAgeGroup|hasOccupation, value) per user,
//   (movie, hasGenre, genre) per set genre flag.
// Users are interned first (u.user order), then movies (u.item order).
KnowledgeGraph LoadMovieLens(const std::filesystem::path& directory);

// Reads the canonical triple format. Malformed lines fail with the line
// number.
KnowledgeGraph LoadTsv(const std::filesystem::path& path);
KnowledgeGraph ReadTriples(std::istream& in, std::string_view source_name);

KnowledgeGraph LoadDataset(const DatasetManifest& manifest);

// Picks kMovieLens100K for a directory containing u.data, kGenericTsv
// otherwise.
DatasetManifest DetectDataset(const std::filesystem::path& path);

}  // namespace kgepb

#endif  // KGEPB_INGEST_H_
