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

#include "kgepb/sanitize.h"

#include <algorithm>
#include <limits>
#include <string>

#include "kgepb/error.h"
#include "kgepb/random.h"

namespace kgepb {

std::string_view ProvenanceName(Provenance p) {
  return p == Provenance::kKept ? "kept" : "random";
}

void SanitizeConfig::Validate() const {
  if (keep_top > shuffle_window) {
    throw Error(ErrorCode::kInvalidArgument,
                "keep_top t=" + std::to_string(keep_top) +
                    " exceeds the shuffle window W=" + std::to_string(shuffle_window));
  }
  if (shuffle && shuffle_window < k()) {
    throw Error(ErrorCode::kInvalidArgument,
                "shuffle window W=" + std::to_string(shuffle_window) +
                    " is smaller than K=" + std::to_string(k()));
  }
  if (k() == 0) throw Error(ErrorCode::kInvalidArgument, "K = t + r must be positive");
}

SanitizedList Sanitize(const RecommendationList& ranked,
                       std::span<const EntityId> universe,
                       const SanitizeConfig& config, const ItemScorer& scorer,
                       std::span<const EntityId> history) {
  config.Validate();
  if (config.shuffle && ranked.size() < config.shuffle_window) {
    throw Error(ErrorCode::kFailedPrecondition,
                "shuffling needs at least W=" + std::to_string(config.shuffle_window) +
                    " ranked items, got " + std::to_string(ranked.size()));
  }
  const size_t window = std::min(config.shuffle_window, ranked.size());
  if (config.keep_top > window) {
    throw Error(ErrorCode::kFailedPrecondition,
                "ranked list shorter than keep_top");
  }

  // Window positions, permuted when shuffling.
  std::vector<size_t> top(window);
  for (size_t i = 0; i < window; ++i) top[i] = i;
  if (config.shuffle) {
    Rng shuffle_rng(DeriveSeed(config.seed, "shuffle"));
    Shuffle(std::span<size_t>(top), shuffle_rng);
  }

  SanitizedList out{ranked.user, {}, {}, {}};
  for (size_t i = 0; i < config.keep_top; ++i) {
    out.items.push_back(ranked.items[top[i]]);
    out.provenance.push_back(Provenance::kKept);
    out.scores.push_back(ranked.scores[top[i]]);
  }

  std::vector<EntityId> blocked(ranked.items.begin(), ranked.items.begin() + window);
  if (config.exclude_history) blocked.insert(blocked.end(), history.begin(), history.end());
  std::sort(blocked.begin(), blocked.end());
  std::vector<EntityId> pool;
  pool.reserve(universe.size());
  for (EntityId m : universe) {
    if (!std::binary_search(blocked.begin(), blocked.end(), m)) pool.push_back(m);
  }
  if (pool.size() < config.random_count) {
    throw Error(ErrorCode::kFailedPrecondition,
                "universe minus the top window has " + std::to_string(pool.size()) +
                    " items, fewer than r=" + std::to_string(config.random_count));
  }
  Rng draw_rng(DeriveSeed(config.seed, "draw"));
  const std::vector<EntityId> drawn = SampleWithoutReplacement(
      std::span<const EntityId>(pool), config.random_count, draw_rng);
  for (EntityId m : drawn) {
    out.items.push_back(m);
    out.provenance.push_back(Provenance::kRandom);
    auto pos = std::find(ranked.items.begin(), ranked.items.end(), m);
    if (pos != ranked.items.end()) {
      out.scores.push_back(ranked.scores[pos - ranked.items.begin()]);
    } else {
      out.scores.push_back(scorer ? scorer(m)
                                  : std::numeric_limits<double>::quiet_NaN());
    }
  }
  return out;
}

std::vector<SanitizedList> SanitizeAll(std::span<const RecommendationList> ranked,
                                       const KnowledgeGraph& graph,
                                       const EmbeddingModel& model,
                                       RelationId relation,
                                       const SanitizeConfig& config) {
  const std::vector<EntityId> universe = graph.EntitiesWithRole(Role::kItem);
  std::vector<SanitizedList> out;
  out.reserve(ranked.size());
  for (const RecommendationList& list : ranked) {
    SanitizeConfig per_user = config;
    per_user.seed = UserSeed(config.seed, list.user.value);
    const ItemScorer scorer = [&](EntityId m) {
      return model.Score(Triple{list.user, relation, m});
    };
    out.push_back(Sanitize(list, universe, per_user, scorer,
                           graph.Tails(list.user, relation)));
  }
  return out;
}

}  // namespace kgepb
