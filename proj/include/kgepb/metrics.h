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

#ifndef KGEPB_METRICS_H_
#define KGEPB_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgepb/attack.h"
#include "kgepb/graph.h"
#include "kgepb/model.h"
#include "kgepb/ranker.h"
#include "kgepb/sanitize.h"

namespace kgepb {

enum class UtilityMode {
  // Scores mapped through sigmoid(margin + score); Q lands in [0, 1].
  kPlausibility,
  // Raw scores; for ablation only, no [0, 1] guarantee.
  kRawScore,
};

// Q = sum of item values over `sanitized` / sum over `top_k`, where an
// item's value is its recommender plausibility for (user, relation, item).
// Plausibility mode clamps to [0, 1].
double ListUtility(const EmbeddingModel& model, EntityId user,
                   RelationId relation, std::span<const EntityId> top_k,
                   std::span<const EntityId> sanitized,
                   UtilityMode mode = UtilityMode::kPlausibility);

// Q_u, the arithmetic mean of per-user utilities.
double MeanUtility(std::span<const double> utilities);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};

MeanStd Aggregate(std::span<const double> values);

enum class Variant { kPlain, kShuffled };

std::string_view VariantName(Variant v);  // "S" / "S_shuf"

struct TradeoffPoint {
  size_t k = 0;
  size_t keep_top = 0;
  size_t random_count = 0;
  Variant variant = Variant::kPlain;

  // Table column label: "Top", "t3-r2", ..., "Rand".
  std::string ColumnLabel() const;
};

// K in {5, 10}; columns Top, three mixed (t, r) splits, Rand; both variants.
std::vector<TradeoffPoint> StandardGrid();

struct TradeoffRow {
  TradeoffPoint point;
  MeanStd iu;
  MeanStd qu;
  std::vector<double> iu_runs;
  std::vector<double> qu_runs;
  size_t runs = 0;
};

struct SweepOptions {
  size_t runs = 5;
  uint64_t seed = 0;
  AttackSetup attack;  // attack.seed is ignored; runs derive their own
  size_t shuffle_window = 10;
  bool exclude_history = false;
  UtilityMode utility = UtilityMode::kPlausibility;
  // Sweep points run concurrently when > 1; each point is deterministic on
  // its own, so results do not depend on this.
  size_t workers = 1;
};

// Called once per (point, run) with the sanitized lists of that run.
using SweepListObserver = std::function<void(
    const TradeoffPoint&, size_t run, std::span<const SanitizedList>)>;

// Seed plumbing, for replaying a single sweep cell.
uint64_t SweepRunSeed(uint64_t seed, size_t run);
uint64_t SweepTargetSeed(uint64_t seed, size_t run);
uint64_t SweepSanitizeSeed(uint64_t seed, size_t run);
uint64_t SweepAttackSeed(uint64_t seed, size_t run);

// For every point and run: sanitize all users' ranked lists, attack the
// sanitized lists, and record I_u and Q_u. Runs share their target users,
// sanitizer stream and attack seed across points, so columns differ only by
// the sanitizer configuration. `graph` is the recommender's training graph.
std::vector<TradeoffRow> TradeoffSweep(const KnowledgeGraph& graph,
                                       const EmbeddingModel& recommender,
                                       std::span<const TradeoffPoint> points,
                                       const SweepOptions& options,
                                       const SweepListObserver& observer = {});

std::vector<ReleasedList> ToReleased(std::span<const SanitizedList> lists);

// `dataset,K,variant,t,r,Iu_mean,Iu_std,Qu_mean,Qu_std,runs`
void WriteTradeoffCsv(std::span<const TradeoffRow> rows, std::string_view dataset,
                      std::ostream& out);
// One line per (row, metric, run): plot-ready long format.
void WriteTradeoffLongCsv(std::span<const TradeoffRow> rows,
                          std::string_view dataset, std::ostream& out);

}  // namespace kgepb

#endif  // KGEPB_METRICS_H_
