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

#ifndef KGEPB_TRAIN_H_
#define KGEPB_TRAIN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kgepb/graph.h"
#include "kgepb/model.h"
#include "kgepb/random.h"

namespace kgepb {

enum class CorruptionMode { kHeadOrTail, kHeadOnly, kTailOnly };

// Corrupts the head or the tail of a positive with a uniformly drawn entity
// of the same role, rejecting corruptions that are facts of the graph.
class NegativeSampler {
 public:
  static constexpr size_t kMaxAttemptsPerNegative = 1000;

  explicit NegativeSampler(const KnowledgeGraph& graph);

  // Appends `count` negatives to `out`. Fails with kPoolExhausted after
  // kMaxAttemptsPerNegative rejected draws for a single negative.
  void SampleInto(const Triple& positive, size_t count, CorruptionMode mode,
                  Rng& rng, std::vector<Triple>& out) const;

  std::vector<Triple> Sample(const Triple& positive, size_t count,
                             CorruptionMode mode, Rng& rng) const;

 private:
  const KnowledgeGraph* graph_;
  std::array<std::vector<EntityId>, 4> pools_;  // indexed by Role
};

std::vector<Triple> SampleNegatives(const Triple& positive,
                                    const KnowledgeGraph& graph, size_t count,
                                    CorruptionMode mode, uint64_t seed);

// Self-adversarial weights: softmax of alpha * score over the negatives.
std::vector<double> AdversarialWeights(std::span<const double> negative_scores,
                                       double alpha);

// L = -log sigmoid(margin + s(pos)) - sum_i p_i log sigmoid(-s(neg_i) - margin)
// with p = AdversarialWeights(s(neg), alpha).
double NegativeSamplingLoss(const EmbeddingModel& model, const Triple& positive,
                            std::span<const Triple> negatives, double alpha);

// Gradient rows keyed by entity / relation id. Only touched rows exist.
class SparseGradient {
 public:
  SparseGradient() = default;
  SparseGradient(size_t num_entities, size_t entity_width,
                 size_t num_relations, size_t relation_width);
  explicit SparseGradient(const EmbeddingModel& model)
      : SparseGradient(model.num_entities(), model.shape().entity_width(),
                       model.num_relations(), model.shape().relation_width()) {}

  std::span<double> EntityRow(EntityId id);
  std::span<double> RelationRow(RelationId id);

  // nullptr when the row was never touched.
  const double* FindEntity(EntityId id) const;
  const double* FindRelation(RelationId id) const;

  std::span<const EntityId> touched_entities() const { return touched_entities_; }
  std::span<const RelationId> touched_relations() const { return touched_relations_; }

  void Clear();

 private:
  size_t entity_width_ = 0;
  size_t relation_width_ = 0;
  std::vector<int32_t> entity_slot_;
  std::vector<int32_t> relation_slot_;
  std::vector<EntityId> touched_entities_;
  std::vector<RelationId> touched_relations_;
  std::vector<double> entity_rows_;
  std::vector<double> relation_rows_;
};

// Adds `scale * dL/dparams` of NegativeSamplingLoss into `gradient` and
// returns the loss. The softmax weights are differentiated too, so the
// result is the exact gradient of the loss value.
double LossGradient(const EmbeddingModel& model, const Triple& positive,
                    std::span<const Triple> negatives, double alpha,
                    double scale, SparseGradient& gradient);

struct TrainConfig {
  ModelKind kind = ModelKind::kRotatE;
  size_t dim = 70;
  size_t epochs = 100;
  size_t batch_size = 64;
  double learning_rate = 0.05;
  size_t negatives = 8;
  double adversarial_temperature = 1.0;
  double margin = 6.0;
  int norm_order = 2;
  CorruptionMode corruption = CorruptionMode::kHeadOrTail;
  uint64_t seed = 0;
  // Hogwild-style updates across workers; results then vary run to run.
  bool parallel = false;
  size_t workers = 0;  // 0 = hardware concurrency

  ModelShape shape() const { return {kind, dim, margin, norm_order}; }
  void Validate() const;
};

// Recommender defaults: the engine defaults with 30 epochs and margin 2.
TrainConfig DefaultRecommenderTrainConfig();

struct EpochStats {
  size_t epoch = 0;
  double mean_loss = 0.0;
};
using TrainObserver = std::function<void(const EpochStats&)>;

// The model Train starts from for this graph and config.
EmbeddingModel InitialModel(const KnowledgeGraph& graph,
                            const TrainConfig& config);

// Mini-batch SGD over shuffled positives, `negatives` corruptions each.
// Each step follows the gradient summed over the batch; the reported loss is
// the mean over positives. Single-worker mode is
// bit-deterministic given the seed. Fails with kNonFinite on a NaN/inf loss.
EmbeddingModel Train(const KnowledgeGraph& graph, const TrainConfig& config,
                     const TrainObserver& observer = {});

}  // namespace kgepb

#endif  // KGEPB_TRAIN_H_
