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

#include "kgepb/train.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "kgepb/error.h"

namespace kgepb {
namespace {

void CopyRow(std::span<const double> src, double* dst, bool relaxed) {
  if (!relaxed) {
    std::copy(src.begin(), src.end(), dst);
    return;
  }
  for (size_t k = 0; k < src.size(); ++k) {
    dst[k] = std::atomic_ref<double>(const_cast<double&>(src[k]))
                 .load(std::memory_order_relaxed);
  }
}

// Loss and gradient for one positive and its negatives. With `relaxed`,
// parameter rows are read through relaxed atomics so concurrent writers are
// well defined.
double LossGradientImpl(const EmbeddingModel& model, const Triple& positive,
                        std::span<const Triple> negatives, double alpha,
                        double scale, SparseGradient* gradient, bool relaxed) {
  if (negatives.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one negative is required");
  }
  const ModelShape& shape = model.shape();
  const size_t ew = shape.entity_width();
  const size_t rw = shape.relation_width();
  const size_t stride = 2 * ew + rw;
  const size_t count = negatives.size() + 1;

  thread_local std::vector<double> rows;
  thread_local std::vector<double> scores;
  rows.resize(count * stride);
  scores.resize(count);

  auto triple_at = [&](size_t i) -> const Triple& {
    return i == 0 ? positive : negatives[i - 1];
  };
  auto head_row = [&](size_t i) {
    return std::span<const double>(rows).subspan(i * stride, ew);
  };
  auto rel_row = [&](size_t i) {
    return std::span<const double>(rows).subspan(i * stride + ew, rw);
  };
  auto tail_row = [&](size_t i) {
    return std::span<const double>(rows).subspan(i * stride + ew + rw, ew);
  };

  // Triples sharing the positive's relation (all sampled corruptions) reuse
  // one set of RotatE cosines and sines.
  const bool rotate = shape.kind == ModelKind::kRotatE;
  thread_local RotationTrig shared_trig;
  thread_local RotationTrig own_trig;
  auto trig_for = [&](size_t i) -> const RotationTrig& {
    if (triple_at(i).relation == positive.relation) return shared_trig;
    own_trig.Assign(rel_row(i));
    return own_trig;
  };

  for (size_t i = 0; i < count; ++i) {
    const Triple& t = triple_at(i);
    double* base = rows.data() + i * stride;
    CopyRow(model.Entity(t.head), base, relaxed);
    CopyRow(model.Relation(t.relation), base + ew, relaxed);
    CopyRow(model.Entity(t.tail), base + ew + rw, relaxed);
    if (rotate) {
      if (i == 0) shared_trig.Assign(rel_row(0));
      scores[i] = RotatEScore(head_row(i), trig_for(i), tail_row(i));
    } else {
      scores[i] = ScoreRows(shape, head_row(i), rel_row(i), tail_row(i));
    }
  }

  const double margin = shape.margin;
  const std::span<const double> negative_scores(scores.data() + 1, count - 1);
  const std::vector<double> weights = AdversarialWeights(negative_scores, alpha);

  double weighted = 0.0;
  for (size_t j = 0; j + 1 < count; ++j) {
    weighted += weights[j] * LogSigmoid(-negative_scores[j] - margin);
  }
  const double loss = -LogSigmoid(margin + scores[0]) - weighted;
  if (gradient == nullptr) return loss;

  // dL/ds for the positive, then for each negative including the softmax
  // dependence of its weight.
  std::vector<double> dscore(count);
  dscore[0] = -Logistic(-(margin + scores[0]));
  for (size_t j = 0; j + 1 < count; ++j) {
    const double s = negative_scores[j];
    dscore[j + 1] = weights[j] * Logistic(s + margin) -
                    alpha * weights[j] * (LogSigmoid(-s - margin) - weighted);
  }

  for (size_t i = 0; i < count; ++i) {
    const Triple& t = triple_at(i);
    // Row handles are fetched one at a time: a later EntityRow call may
    // grow storage and invalidate earlier spans.
    const double w = scale * dscore[i];
    if (w == 0.0) continue;
    gradient->EntityRow(t.head);
    gradient->RelationRow(t.relation);
    gradient->EntityRow(t.tail);
    if (rotate) {
      RotatEScoreGradient(head_row(i), trig_for(i), tail_row(i), w,
                          gradient->EntityRow(t.head),
                          gradient->RelationRow(t.relation),
                          gradient->EntityRow(t.tail));
    } else {
      ScoreGradientRows(shape, head_row(i), rel_row(i), tail_row(i), w,
                        gradient->EntityRow(t.head),
                        gradient->RelationRow(t.relation),
                        gradient->EntityRow(t.tail));
    }
  }
  return loss;
}

void ApplyRow(std::span<double> params, const double* grad, double lr,
              bool relaxed, bool wrap_phase) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (size_t k = 0; k < params.size(); ++k) {
    double value;
    if (relaxed) {
      value = std::atomic_ref<double>(params[k]).load(std::memory_order_relaxed);
    } else {
      value = params[k];
    }
    value -= lr * grad[k];
    if (wrap_phase) {
      value = std::fmod(value, kTwoPi);
      if (value < 0.0) value += kTwoPi;
    }
    if (relaxed) {
      std::atomic_ref<double>(params[k]).store(value, std::memory_order_relaxed);
    } else {
      params[k] = value;
    }
  }
}

}  // namespace

NegativeSampler::NegativeSampler(const KnowledgeGraph& graph) : graph_(&graph) {
  for (uint32_t i = 0; i < graph.num_entities(); ++i) {
    pools_[static_cast<size_t>(graph.EntityRole(EntityId{i}))].push_back(EntityId{i});
  }
}

void NegativeSampler::SampleInto(const Triple& positive, size_t count,
                                 CorruptionMode mode, Rng& rng,
                                 std::vector<Triple>& out) const {
  const auto& head_pool = pools_[static_cast<size_t>(graph_->EntityRole(positive.head))];
  const auto& tail_pool = pools_[static_cast<size_t>(graph_->EntityRole(positive.tail))];
  for (size_t n = 0; n < count; ++n) {
    bool found = false;
    for (size_t attempt = 0; attempt < kMaxAttemptsPerNegative; ++attempt) {
      bool corrupt_head = mode == CorruptionMode::kHeadOnly;
      if (mode == CorruptionMode::kHeadOrTail) corrupt_head = rng.Uniform(2) == 0;
      const auto& pool = corrupt_head ? head_pool : tail_pool;
      const EntityId pick = pool[rng.Uniform(pool.size())];
      Triple candidate = positive;
      (corrupt_head ? candidate.head : candidate.tail) = pick;
      if (candidate == positive || graph_->Contains(candidate)) continue;
      out.push_back(candidate);
      found = true;
      break;
    }
    if (!found) {
      throw Error(ErrorCode::kPoolExhausted,
                  "no valid corruption of (" + graph_->EntityLabel(positive.head) +
                      ", " + graph_->RelationLabel(positive.relation) + ", " +
                      graph_->EntityLabel(positive.tail) + ") after " +
                      std::to_string(kMaxAttemptsPerNegative) + " draws");
    }
  }
}

std::vector<Triple> NegativeSampler::Sample(const Triple& positive, size_t count,
                                            CorruptionMode mode, Rng& rng) const {
  std::vector<Triple> out;
  out.reserve(count);
  SampleInto(positive, count, mode, rng, out);
  return out;
}

std::vector<Triple> SampleNegatives(const Triple& positive,
                                    const KnowledgeGraph& graph, size_t count,
                                    CorruptionMode mode, uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "count must be >= 1");
  Rng rng(seed);
  return NegativeSampler(graph).Sample(positive, count, mode, rng);
}

std::vector<double> AdversarialWeights(std::span<const double> negative_scores,
                                       double alpha) {
  std::vector<double> weights(negative_scores.size());
  if (weights.empty()) return weights;
  const double top = alpha * *std::max_element(negative_scores.begin(),
                                               negative_scores.end());
  double total = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    weights[i] = std::exp(alpha * negative_scores[i] - top);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

double NegativeSamplingLoss(const EmbeddingModel& model, const Triple& positive,
                            std::span<const Triple> negatives, double alpha) {
  return LossGradientImpl(model, positive, negatives, alpha, 0.0, nullptr, false);
}

SparseGradient::SparseGradient(size_t num_entities, size_t entity_width,
                               size_t num_relations, size_t relation_width)
    : entity_width_(entity_width),
      relation_width_(relation_width),
      entity_slot_(num_entities, -1),
      relation_slot_(num_relations, -1) {}

std::span<double> SparseGradient::EntityRow(EntityId id) {
  int32_t& slot = entity_slot_.at(id.value);
  if (slot < 0) {
    slot = static_cast<int32_t>(touched_entities_.size());
    touched_entities_.push_back(id);
    entity_rows_.resize(entity_rows_.size() + entity_width_, 0.0);
  }
  return std::span<double>(entity_rows_).subspan(slot * entity_width_, entity_width_);
}

std::span<double> SparseGradient::RelationRow(RelationId id) {
  int32_t& slot = relation_slot_.at(id.value);
  if (slot < 0) {
    slot = static_cast<int32_t>(touched_relations_.size());
    touched_relations_.push_back(id);
    relation_rows_.resize(relation_rows_.size() + relation_width_, 0.0);
  }
  return std::span<double>(relation_rows_)
      .subspan(slot * relation_width_, relation_width_);
}

const double* SparseGradient::FindEntity(EntityId id) const {
  const int32_t slot = entity_slot_.at(id.value);
  return slot < 0 ? nullptr : entity_rows_.data() + slot * entity_width_;
}

const double* SparseGradient::FindRelation(RelationId id) const {
  const int32_t slot = relation_slot_.at(id.value);
  return slot < 0 ? nullptr : relation_rows_.data() + slot * relation_width_;
}

void SparseGradient::Clear() {
  for (EntityId id : touched_entities_) entity_slot_[id.value] = -1;
  for (RelationId id : touched_relations_) relation_slot_[id.value] = -1;
  touched_entities_.clear();
  touched_relations_.clear();
  entity_rows_.clear();
  relation_rows_.clear();
}

double LossGradient(const EmbeddingModel& model, const Triple& positive,
                    std::span<const Triple> negatives, double alpha,
                    double scale, SparseGradient& gradient) {
  return LossGradientImpl(model, positive, negatives, alpha, scale, &gradient,
                          false);
}

void TrainConfig::Validate() const {
  if (dim == 0 || epochs == 0 || batch_size == 0 || negatives == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "dim, epochs, batch size and negatives must be positive");
  }
  if (!(learning_rate >= 0.0) || !(margin > 0.0) ||
      !(adversarial_temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "learning rate and temperature must be >= 0, margin > 0");
  }
}

TrainConfig DefaultRecommenderTrainConfig() {
  TrainConfig config;
  config.epochs = 30;
  config.margin = 2.0;
  return config;
}

EmbeddingModel InitialModel(const KnowledgeGraph& graph,
                            const TrainConfig& config) {
  return EmbeddingModel::Initialize(config.shape(), graph.num_entities(),
                                    graph.num_relations(),
                                    DeriveSeed(config.seed, "init"));
}

EmbeddingModel Train(const KnowledgeGraph& graph, const TrainConfig& config,
                     const TrainObserver& observer) {
  config.Validate();
  if (graph.num_triples() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot train on an empty graph");
  }
  EmbeddingModel model = InitialModel(graph, config);
  const NegativeSampler sampler(graph);
  const auto triples = graph.triples();
  const size_t num_batches =
      (triples.size() + config.batch_size - 1) / config.batch_size;
  const bool wrap = config.kind == ModelKind::kRotatE;

  size_t workers = 1;
  if (config.parallel) {
    workers = config.workers ? config.workers
                             : std::max(1u, std::thread::hardware_concurrency());
  }
  const bool relaxed = workers > 1;

  std::vector<size_t> order(triples.size());
  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng order_rng(DeriveSeed(config.seed, "epoch", epoch));
    Shuffle(std::span<size_t>(order), order_rng);

    std::atomic<size_t> next_batch{0};
    std::vector<double> worker_loss(workers, 0.0);

    auto run_worker = [&](size_t worker) {
      SparseGradient gradient(model);
      std::vector<Triple> negatives;
      while (true) {
        const size_t b = next_batch.fetch_add(1);
        if (b >= num_batches) return;
        const size_t begin = b * config.batch_size;
        const size_t end = std::min(begin + config.batch_size, triples.size());
        Rng rng(DeriveSeed(config.seed, "batch", epoch * num_batches + b));
        gradient.Clear();
        double batch_loss = 0.0;
        for (size_t i = begin; i < end; ++i) {
          const Triple& positive = triples[order[i]];
          negatives.clear();
          sampler.SampleInto(positive, config.negatives, config.corruption, rng,
                             negatives);
          batch_loss += LossGradientImpl(model, positive, negatives,
                                         config.adversarial_temperature, 1.0,
                                         &gradient, relaxed);
        }
        batch_loss /= static_cast<double>(end - begin);
        if (!std::isfinite(batch_loss)) {
          std::ostringstream msg;
          msg << "loss " << batch_loss << " at epoch " << epoch << ", batch " << b
              << ", learning rate " << config.learning_rate;
          throw Error(ErrorCode::kNonFinite, msg.str());
        }
        worker_loss[worker] += batch_loss;
        for (EntityId id : gradient.touched_entities()) {
          ApplyRow(model.MutableEntity(id), gradient.FindEntity(id),
                   config.learning_rate, relaxed, false);
        }
        for (RelationId id : gradient.touched_relations()) {
          ApplyRow(model.MutableRelation(id), gradient.FindRelation(id),
                   config.learning_rate, relaxed, wrap);
        }
      }
    };

    if (workers == 1) {
      run_worker(0);
    } else {
      std::vector<std::exception_ptr> errors(workers);
      {
        std::vector<std::jthread> threads;
        for (size_t w = 0; w < workers; ++w) {
          threads.emplace_back([&, w] {
            try {
              run_worker(w);
            } catch (...) {
              errors[w] = std::current_exception();
              next_batch.store(num_batches);
            }
          });
        }
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    if (observer) {
      const double total =
          std::accumulate(worker_loss.begin(), worker_loss.end(), 0.0);
      observer({epoch, total / static_cast<double>(num_batches)});
    }
  }
  return model;
}

}  // namespace kgepb
