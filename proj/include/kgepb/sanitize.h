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

#ifndef KGEPB_SANITIZE_H_
#define KGEPB_SANITIZE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "kgepb/graph.h"
#include "kgepb/model.h"
#include "kgepb/ranker.h"

namespace kgepb {

struct SanitizeConfig {
  size_t keep_top = 0;      // t
  size_t random_count = 0;  // r
  bool shuffle = false;
  size_t shuffle_window = 10;  // W
  uint64_t seed = 0;
  // Also keep the user's interaction history out of the random draw.
  bool exclude_history = false;

  size_t k() const { return keep_top + random_count; }
  void Validate() const;
};

enum class Provenance : uint8_t { kKept, kRandom };

std::string_view ProvenanceName(Provenance p);

struct SanitizedList {
  EntityId user;
  std::vector<EntityId> items;
  std::vector<Provenance> provenance;
  // Recommender scores for every item, kept and random alike.
  std::vector<double> scores;

  size_t size() const { return items.size(); }
};

using ItemScorer = std::function<double(EntityId)>;

// Keeps the first t items of the top-W window (shuffled when configured) and
// appends r items drawn uniformly without replacement from
// universe \ window, in draw order. The shuffle and the draw use separate
// streams DeriveSeed(seed, "shuffle") and DeriveSeed(seed, "draw"), so the
// random suffix does not depend on the shuffle flag.
//
// `ranked` must hold at least W items when shuffling; without shuffle the
// window is its first min(W, size) items. Items whose score is not in
// `ranked` are scored with `scorer` (NaN if none is given).
SanitizedList Sanitize(const RecommendationList& ranked,
                       std::span<const EntityId> universe,
                       const SanitizeConfig& config,
                       const ItemScorer& scorer = {},
                       std::span<const EntityId> history = {});

// Sanitizes every user's list with per-user seeds UserSeed(config.seed, user)
// and recommender scores from `model` for `relation`. Universe is the
// item-role entities of `graph`.
std::vector<SanitizedList> SanitizeAll(std::span<const RecommendationList> ranked,
                                       const KnowledgeGraph& graph,
                                       const EmbeddingModel& model,
                                       RelationId relation,
                                       const SanitizeConfig& config);

}  // namespace kgepb

#endif  // KGEPB_SANITIZE_H_
