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

#include "kgepb/metrics.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <ostream>
#include <thread>

#include "kgepb/error.h"
#include "kgepb/random.h"

namespace kgepb {
namespace {

double ItemValue(const EmbeddingModel& model, const Triple& triple,
                 UtilityMode mode) {
  return mode == UtilityMode::kPlausibility ? model.Plausibility(triple)
                                            : model.Score(triple);
}

std::string Fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

}  // namespace

double ListUtility(const EmbeddingModel& model, EntityId user,
                   RelationId relation, std::span<const EntityId> top_k,
                   std::span<const EntityId> sanitized, UtilityMode mode) {
  if (top_k.size() != sanitized.size() || top_k.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "utility needs two non-empty lists of equal length K");
  }
  double numerator = 0.0;
  double denominator = 0.0;
  for (EntityId m : sanitized) numerator += ItemValue(model, {user, relation, m}, mode);
  for (EntityId m : top_k) denominator += ItemValue(model, {user, relation, m}, mode);
  if (denominator == 0.0) {
    throw Error(ErrorCode::kFailedPrecondition, "top-K utility mass is zero");
  }
  const double q = numerator / denominator;
  return mode == UtilityMode::kPlausibility ? std::clamp(q, 0.0, 1.0) : q;
}

double MeanUtility(std::span<const double> utilities) {
  if (utilities.empty()) throw Error(ErrorCode::kInvalidArgument, "no users");
  return std::accumulate(utilities.begin(), utilities.end(), 0.0) /
         static_cast<double>(utilities.size());
}

MeanStd Aggregate(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to aggregate");
  MeanStd out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

std::string_view VariantName(Variant v) {
  return v == Variant::kPlain ? "S" : "S_shuf";
}

std::string TradeoffPoint::ColumnLabel() const {
  if (random_count == 0) return "Top";
  if (keep_top == 0) return "Rand";
  return "t" + std::to_string(keep_top) + "-r" + std::to_string(random_count);
}

std::vector<TradeoffPoint> StandardGrid() {
  struct Column {
    size_t t, r;
  };
  const std::vector<std::pair<size_t, std::vector<Column>>> layout = {
      {5, {{5, 0}, {3, 2}, {2, 3}, {1, 4}, {0, 5}}},
      {10, {{10, 0}, {7, 3}, {5, 5}, {3, 7}, {0, 10}}},
  };
  std::vector<TradeoffPoint> grid;
  for (const auto& [k, columns] : layout) {
    for (Variant v : {Variant::kPlain, Variant::kShuffled}) {
      for (const Column& c : columns) grid.push_back({k, c.t, c.r, v});
    }
  }
  return grid;
}

uint64_t SweepRunSeed(uint64_t seed, size_t run) {
  return DeriveSeed(seed, "sweep.run", run);
}
uint64_t SweepTargetSeed(uint64_t seed, size_t run) {
  return DeriveSeed(SweepRunSeed(seed, run), "targets");
}
uint64_t SweepSanitizeSeed(uint64_t seed, size_t run) {
  return DeriveSeed(SweepRunSeed(seed, run), "sanitize");
}
uint64_t SweepAttackSeed(uint64_t seed, size_t run) {
  return DeriveSeed(SweepRunSeed(seed, run), "attack");
}

std::vector<ReleasedList> ToReleased(std::span<const SanitizedList> lists) {
  std::vector<ReleasedList> out;
  out.reserve(lists.size());
  for (const SanitizedList& l : lists) out.push_back({l.user, l.items});
  return out;
}

std::vector<TradeoffRow> TradeoffSweep(const KnowledgeGraph& graph,
                                       const EmbeddingModel& recommender,
                                       std::span<const TradeoffPoint> points,
                                       const SweepOptions& options,
                                       const SweepListObserver& observer) {
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "empty sweep grid");
  if (options.runs == 0) throw Error(ErrorCode::kInvalidArgument, "runs must be >= 1");

  const RelationId interacted = graph.RelationOrDie(relations::kInteractedWith);
  const RelationId sensitive = graph.RelationOrDie(options.attack.sensitive_relation);

  size_t depth = options.shuffle_window;
  for (const TradeoffPoint& p : points) depth = std::max(depth, p.k);
  const std::vector<RecommendationList> ranked =
      TopKForAllUsers(recommender, graph, interacted, depth);

  std::vector<EntityId> attackable;
  for (EntityId u : graph.EntitiesWithRole(Role::kUser)) {
    if (!graph.Tails(u, sensitive).empty()) attackable.push_back(u);
  }
  std::vector<UserPartition> partitions;
  for (size_t run = 0; run < options.runs; ++run) {
    partitions.push_back(SplitAttackUsers(attackable, options.attack.target_fraction,
                                          SweepTargetSeed(options.seed, run)));
  }

  const size_t num_tasks = points.size() * options.runs;
  std::vector<double> iu(num_tasks), qu(num_tasks);

  auto run_task = [&](size_t task) {
    const TradeoffPoint& point = points[task / options.runs];
    const size_t run = task % options.runs;
    SanitizeConfig config;
    config.keep_top = point.keep_top;
    config.random_count = point.random_count;
    config.shuffle = point.variant == Variant::kShuffled;
    config.shuffle_window = options.shuffle_window;
    config.exclude_history = options.exclude_history;
    config.seed = SweepSanitizeSeed(options.seed, run);
    const std::vector<SanitizedList> lists =
        SanitizeAll(ranked, graph, recommender, interacted, config);
    if (observer) observer(point, run, lists);

    std::vector<double> utilities;
    utilities.reserve(lists.size());
    for (size_t u = 0; u < lists.size(); ++u) {
      const std::span<const EntityId> top(ranked[u].items.data(), point.k);
      utilities.push_back(ListUtility(recommender, lists[u].user, interacted, top,
                                      lists[u].items, options.utility));
    }
    qu[task] = MeanUtility(utilities);

    AttackSetup setup = options.attack;
    setup.seed = SweepAttackSeed(options.seed, run);
    const std::vector<ReleasedList> released = ToReleased(lists);
    iu[task] = RunAttack(released, graph, setup, partitions[run]).success_rate;
  };

  const size_t workers = std::max<size_t>(1, std::min(options.workers, num_tasks));
  if (workers == 1 || observer) {
    for (size_t task = 0; task < num_tasks; ++task) run_task(task);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> threads;
      for (size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
          try {
            for (size_t task = next.fetch_add(1); task < num_tasks;
                 task = next.fetch_add(1)) {
              run_task(task);
            }
          } catch (...) {
            errors[w] = std::current_exception();
            next.store(num_tasks);
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<TradeoffRow> rows;
  for (size_t p = 0; p < points.size(); ++p) {
    TradeoffRow row;
    row.point = points[p];
    row.runs = options.runs;
    row.iu_runs.assign(iu.begin() + p * options.runs, iu.begin() + (p + 1) * options.runs);
    row.qu_runs.assign(qu.begin() + p * options.runs, qu.begin() + (p + 1) * options.runs);
    row.iu = Aggregate(row.iu_runs);
    row.qu = Aggregate(row.qu_runs);
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteTradeoffCsv(std::span<const TradeoffRow> rows, std::string_view dataset,
                      std::ostream& out) {
  out << "dataset,K,variant,t,r,Iu_mean,Iu_std,Qu_mean,Qu_std,runs\n";
  for (const TradeoffRow& row : rows) {
    out << dataset << ',' << row.point.k << ',' << VariantName(row.point.variant)
        << ',' << row.point.keep_top << ',' << row.point.random_count << ','
        << Fixed(row.iu.mean) << ',' << Fixed(row.iu.std) << ','
        << Fixed(row.qu.mean) << ',' << Fixed(row.qu.std) << ',' << row.runs
        << '\n';
  }
}

void WriteTradeoffLongCsv(std::span<const TradeoffRow> rows,
                          std::string_view dataset, std::ostream& out) {
  out << "dataset,K,variant,column,t,r,metric,run,value\n";
  for (const TradeoffRow& row : rows) {
    for (const auto& [metric, values] :
         {std::pair{"Iu", &row.iu_runs}, std::pair{"Qu", &row.qu_runs}}) {
      for (size_t run = 0; run < values->size(); ++run) {
        out << dataset << ',' << row.point.k << ',' << VariantName(row.point.variant)
            << ',' << row.point.ColumnLabel() << ',' << row.point.keep_top << ','
            << row.point.random_count << ',' << metric << ',' << run << ','
            << Fixed((*values)[run]) << '\n';
      }
    }
  }
}

}  // namespace kgepb
