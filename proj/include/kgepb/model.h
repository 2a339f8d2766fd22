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

#ifndef KGEPB_MODEL_H_
#define KGEPB_MODEL_H_

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgepb/graph.h"

namespace kgepb {

enum class ModelKind { kTransE, kRotatE };

std::string_view ModelKindName(ModelKind kind);
ModelKind ParseModelKind(std::string_view name);

struct ModelShape {
  ModelKind kind = ModelKind::kRotatE;
  // Real dimension for TransE, complex dimension for RotatE.
  size_t dim = 0;
  double margin = 6.0;
  // TransE distance norm, 1 or 2. RotatE always uses the Euclidean norm.
  int norm_order = 2;

  // Reals per entity row: dim for TransE, 2*dim for RotatE laid out as
  // [re_0 .. re_{d-1}, im_0 .. im_{d-1}].
  size_t entity_width() const {
    return kind == ModelKind::kRotatE ? 2 * dim : dim;
  }
  // Reals per relation row: translation vector or rotation phases.
  size_t relation_width() const { return dim; }

  bool operator==(const ModelShape&) const = default;
};

// Scores one triple from raw parameter rows. Higher is more plausible.
//   TransE: -||h + r - t||_p
//   RotatE: -||h o e^{i theta} - t||_2, complex elementwise product
double ScoreRows(const ModelShape& shape, std::span<const double> head,
                 std::span<const double> relation, std::span<const double> tail);

// Accumulates `weight * d score / d row` into the three gradient rows.
// Returns the score. A zero distance contributes no gradient.
double ScoreGradientRows(const ModelShape& shape, std::span<const double> head,
                         std::span<const double> relation,
                         std::span<const double> tail, double weight,
                         std::span<double> grad_head,
                         std::span<double> grad_relation,
                         std::span<double> grad_tail);

// Cosines and sines of a RotatE phase row, shared by every triple of the
// same relation.
struct RotationTrig {
  std::vector<double> cos;
  std::vector<double> sin;

  RotationTrig() = default;
  explicit RotationTrig(std::span<const double> phases) { Assign(phases); }
  void Assign(std::span<const double> phases);
};

// RotatE score and gradient with precomputed trig; `grad_phase` receives
// the derivative with respect to the phases.
double RotatEScore(std::span<const double> head, const RotationTrig& rotation,
                   std::span<const double> tail);
double RotatEScoreGradient(std::span<const double> head,
                           const RotationTrig& rotation,
                           std::span<const double> tail, double weight,
                           std::span<double> grad_head,
                           std::span<double> grad_phase,
                           std::span<double> grad_tail);

// The point every tail is compared against for a (head, relation, ?)
// query: h + r (TransE) or h o e^{i theta} (RotatE). The score of tail t is
// then QueryScore(shape, query, t).
std::vector<double> QueryPoint(const ModelShape& shape,
                               std::span<const double> head,
                               std::span<const double> relation);
double QueryScore(const ModelShape& shape, std::span<const double> query,
                  std::span<const double> tail);

inline double Logistic(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                : std::exp(x) / (1.0 + std::exp(x));
}

// log(sigmoid(x)) without overflow.
double LogSigmoid(double x);

// Entity and relation tables plus the scoring kind. Immutable after
// training; concurrent scoring is safe.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  EmbeddingModel(ModelShape shape, size_t num_entities, size_t num_relations);

  // Entities uniform in [-margin/dim, margin/dim] per real component;
  // RotatE phases uniform in [0, 2*pi), TransE relations like entities.
  static EmbeddingModel Initialize(const ModelShape& shape, size_t num_entities,
                                   size_t num_relations, uint64_t seed);

  const ModelShape& shape() const { return shape_; }
  ModelKind kind() const { return shape_.kind; }
  size_t dim() const { return shape_.dim; }
  double margin() const { return shape_.margin; }
  size_t num_entities() const { return num_entities_; }
  size_t num_relations() const { return num_relations_; }

  std::span<const double> Entity(EntityId id) const;
  std::span<double> MutableEntity(EntityId id);
  std::span<const double> Relation(RelationId id) const;
  std::span<double> MutableRelation(RelationId id);

  std::span<const double> entity_table() const { return entities_; }
  std::span<double> mutable_entity_table() { return entities_; }
  std::span<const double> relation_table() const { return relations_; }
  std::span<double> mutable_relation_table() { return relations_; }

  // Unit-modulus complex form of a RotatE relation.
  std::vector<std::complex<double>> RotationOf(RelationId id) const;

  double Score(const Triple& triple) const;
  // sigmoid(margin + score), in (0, 1) and strictly increasing in score.
  double Plausibility(const Triple& triple) const;

  bool operator==(const EmbeddingModel& other) const = default;

 private:
  void CheckTriple(const Triple& triple) const;

  ModelShape shape_;
  size_t num_entities_ = 0;
  size_t num_relations_ = 0;
  std::vector<double> entities_;
  std::vector<double> relations_;
};

// Checkpoint: a versioned text table dump with entity and relation labels.
// Doubles are written in shortest round-trip form, so save/load is exact.
void SaveCheckpoint(const EmbeddingModel& model, const KnowledgeGraph& graph,
                    std::ostream& out);

// Reads a checkpoint and checks its labels against `graph` (ids must line
// up). Header lines starting with '#' are skipped.
EmbeddingModel LoadCheckpoint(std::istream& in, const KnowledgeGraph& graph);

}  // namespace kgepb

#endif  // KGEPB_MODEL_H_
