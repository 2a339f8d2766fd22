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

#include "kgepb/model.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "kgepb/error.h"
#include "kgepb/random.h"

namespace kgepb {

std::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kTransE ? "transe" : "rotate";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "transe") return ModelKind::kTransE;
  if (name == "rotate") return ModelKind::kRotatE;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model '" + std::string(name) + "' (transe|rotate)");
}

double LogSigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

void RotationTrig::Assign(std::span<const double> phases) {
  cos.resize(phases.size());
  sin.resize(phases.size());
  for (size_t k = 0; k < phases.size(); ++k) {
    cos[k] = std::cos(phases[k]);
    sin[k] = std::sin(phases[k]);
  }
}

double RotatEScore(std::span<const double> head, const RotationTrig& rotation,
                   std::span<const double> tail) {
  const size_t d = rotation.cos.size();
  double sum = 0.0;
  for (size_t k = 0; k < d; ++k) {
    const double c = rotation.cos[k];
    const double s = rotation.sin[k];
    const double vr = head[k] * c - head[d + k] * s - tail[k];
    const double vi = head[k] * s + head[d + k] * c - tail[d + k];
    sum += vr * vr + vi * vi;
  }
  return -std::sqrt(sum);
}

double RotatEScoreGradient(std::span<const double> head,
                           const RotationTrig& rotation,
                           std::span<const double> tail, double weight,
                           std::span<double> grad_head,
                           std::span<double> grad_phase,
                           std::span<double> grad_tail) {
  const size_t d = rotation.cos.size();
  const double* cs = rotation.cos.data();
  const double* sn = rotation.sin.data();
  // Rotated head (rr, ri) and residual (vr, vi) per coordinate.
  thread_local std::vector<double> scratch;
  scratch.resize(4 * d);
  double* rr = scratch.data();
  double* ri = rr + d;
  double* vr = ri + d;
  double* vi = vr + d;
  double sum = 0.0;
  for (size_t k = 0; k < d; ++k) {
    rr[k] = head[k] * cs[k] - head[d + k] * sn[k];
    ri[k] = head[k] * sn[k] + head[d + k] * cs[k];
    vr[k] = rr[k] - tail[k];
    vi[k] = ri[k] - tail[d + k];
    sum += vr[k] * vr[k] + vi[k] * vi[k];
  }
  const double norm = std::sqrt(sum);
  if (norm > 0.0) {
    const double factor = -weight / norm;
    for (size_t k = 0; k < d; ++k) {
      grad_head[k] += factor * (vr[k] * cs[k] + vi[k] * sn[k]);
      grad_head[d + k] += factor * (vi[k] * cs[k] - vr[k] * sn[k]);
      grad_phase[k] += factor * (vi[k] * rr[k] - vr[k] * ri[k]);
      grad_tail[k] -= factor * vr[k];
      grad_tail[d + k] -= factor * vi[k];
    }
  }
  return -norm;
}

double ScoreRows(const ModelShape& shape, std::span<const double> head,
                 std::span<const double> relation,
                 std::span<const double> tail) {
  if (shape.kind == ModelKind::kRotatE) {
    return RotatEScore(head, RotationTrig(relation), tail);
  }
  double sum = 0.0;
  for (size_t k = 0; k < shape.dim; ++k) {
    const double v = head[k] + relation[k] - tail[k];
    sum += shape.norm_order == 1 ? std::abs(v) : v * v;
  }
  return shape.norm_order == 1 ? -sum : -std::sqrt(sum);
}

double ScoreGradientRows(const ModelShape& shape, std::span<const double> head,
                         std::span<const double> relation,
                         std::span<const double> tail, double weight,
                         std::span<double> grad_head,
                         std::span<double> grad_relation,
                         std::span<double> grad_tail) {
  if (shape.kind == ModelKind::kRotatE) {
    return RotatEScoreGradient(head, RotationTrig(relation), tail, weight,
                               grad_head, grad_relation, grad_tail);
  }
  const size_t d = shape.dim;
  if (shape.norm_order == 1) {
    double sum = 0.0;
    for (size_t k = 0; k < d; ++k) {
      const double v = head[k] + relation[k] - tail[k];
      sum += std::abs(v);
      const double g = -weight * static_cast<double>((v > 0) - (v < 0));
      grad_head[k] += g;
      grad_relation[k] += g;
      grad_tail[k] -= g;
    }
    return -sum;
  }
  double sum = 0.0;
  for (size_t k = 0; k < d; ++k) {
    const double v = head[k] + relation[k] - tail[k];
    sum += v * v;
  }
  const double norm = std::sqrt(sum);
  if (norm > 0.0) {
    const double factor = -weight / norm;
    for (size_t k = 0; k < d; ++k) {
      const double g = factor * (head[k] + relation[k] - tail[k]);
      grad_head[k] += g;
      grad_relation[k] += g;
      grad_tail[k] -= g;
    }
  }
  return -norm;
}

std::vector<double> QueryPoint(const ModelShape& shape,
                               std::span<const double> head,
                               std::span<const double> relation) {
  const size_t d = shape.dim;
  std::vector<double> query(shape.entity_width());
  if (shape.kind == ModelKind::kTransE) {
    for (size_t k = 0; k < d; ++k) query[k] = head[k] + relation[k];
    return query;
  }
  for (size_t k = 0; k < d; ++k) {
    const double c = std::cos(relation[k]);
    const double s = std::sin(relation[k]);
    query[k] = head[k] * c - head[d + k] * s;
    query[d + k] = head[k] * s + head[d + k] * c;
  }
  return query;
}

double QueryScore(const ModelShape& shape, std::span<const double> query,
                  std::span<const double> tail) {
  double sum = 0.0;
  if (shape.kind == ModelKind::kTransE && shape.norm_order == 1) {
    for (size_t k = 0; k < query.size(); ++k) sum += std::abs(query[k] - tail[k]);
    return -sum;
  }
  for (size_t k = 0; k < query.size(); ++k) {
    const double v = query[k] - tail[k];
    sum += v * v;
  }
  return -std::sqrt(sum);
}

EmbeddingModel::EmbeddingModel(ModelShape shape, size_t num_entities,
                               size_t num_relations)
    : shape_(shape),
      num_entities_(num_entities),
      num_relations_(num_relations),
      entities_(num_entities * shape.entity_width(), 0.0),
      relations_(num_relations * shape.relation_width(), 0.0) {
  if (shape.dim == 0) throw Error(ErrorCode::kInvalidArgument, "dim must be positive");
  if (!(shape.margin > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "margin must be positive");
  }
  if (shape.kind == ModelKind::kTransE && shape.norm_order != 1 &&
      shape.norm_order != 2) {
    throw Error(ErrorCode::kInvalidArgument, "TransE norm order must be 1 or 2");
  }
}

EmbeddingModel EmbeddingModel::Initialize(const ModelShape& shape,
                                          size_t num_entities,
                                          size_t num_relations, uint64_t seed) {
  EmbeddingModel model(shape, num_entities, num_relations);
  const double bound = shape.margin / static_cast<double>(shape.dim);
  Rng entity_rng(DeriveSeed(seed, "init.entities"));
  for (double& x : model.entities_) x = entity_rng.UniformReal(-bound, bound);
  Rng relation_rng(DeriveSeed(seed, "init.relations"));
  for (double& x : model.relations_) {
    x = shape.kind == ModelKind::kRotatE
            ? relation_rng.UniformReal(0.0, 2.0 * std::numbers::pi)
            : relation_rng.UniformReal(-bound, bound);
  }
  return model;
}

std::span<const double> EmbeddingModel::Entity(EntityId id) const {
  if (id.value >= num_entities_) {
    throw Error(ErrorCode::kInvalidArgument, "entity id out of bounds");
  }
  const size_t w = shape_.entity_width();
  return std::span<const double>(entities_).subspan(id.value * w, w);
}

std::span<double> EmbeddingModel::MutableEntity(EntityId id) {
  if (id.value >= num_entities_) {
    throw Error(ErrorCode::kInvalidArgument, "entity id out of bounds");
  }
  const size_t w = shape_.entity_width();
  return std::span<double>(entities_).subspan(id.value * w, w);
}

std::span<const double> EmbeddingModel::Relation(RelationId id) const {
  if (id.value >= num_relations_) {
    throw Error(ErrorCode::kInvalidArgument, "relation id out of bounds");
  }
  const size_t w = shape_.relation_width();
  return std::span<const double>(relations_).subspan(id.value * w, w);
}

std::span<double> EmbeddingModel::MutableRelation(RelationId id) {
  if (id.value >= num_relations_) {
    throw Error(ErrorCode::kInvalidArgument, "relation id out of bounds");
  }
  const size_t w = shape_.relation_width();
  return std::span<double>(relations_).subspan(id.value * w, w);
}

std::vector<std::complex<double>> EmbeddingModel::RotationOf(
    RelationId id) const {
  if (shape_.kind != ModelKind::kRotatE) {
    throw Error(ErrorCode::kFailedPrecondition, "not a RotatE model");
  }
  std::vector<std::complex<double>> out;
  for (double theta : Relation(id)) out.push_back(std::polar(1.0, theta));
  return out;
}

void EmbeddingModel::CheckTriple(const Triple& triple) const {
  if (triple.head.value >= num_entities_ || triple.tail.value >= num_entities_ ||
      triple.relation.value >= num_relations_) {
    throw Error(ErrorCode::kInvalidArgument, "triple id out of bounds");
  }
}

double EmbeddingModel::Score(const Triple& triple) const {
  CheckTriple(triple);
  return ScoreRows(shape_, Entity(triple.head), Relation(triple.relation),
                   Entity(triple.tail));
}

double EmbeddingModel::Plausibility(const Triple& triple) const {
  return Logistic(shape_.margin + Score(triple));
}

namespace {

void WriteDouble(std::ostream& out, double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  out.write(buf, ptr - buf);
}

void WriteRow(std::ostream& out, char tag, const std::string& label,
              std::span<const double> row) {
  out << tag << '\t' << label << '\t';
  for (size_t k = 0; k < row.size(); ++k) {
    if (k) out << ' ';
    WriteDouble(out, row[k]);
  }
  out << '\n';
}

void ReadRow(const std::string& line, char tag, const std::string& label,
             std::span<double> row) {
  const size_t first = line.find('\t');
  const size_t second = first == std::string::npos ? first : line.find('\t', first + 1);
  if (line.empty() || line[0] != tag || second == std::string::npos) {
    throw Error(ErrorCode::kParse, "bad checkpoint row for '" + label + "'");
  }
  if (line.compare(first + 1, second - first - 1, label) != 0) {
    throw Error(ErrorCode::kFailedPrecondition,
                "checkpoint label mismatch: expected '" + label + "'");
  }
  const char* p = line.data() + second + 1;
  const char* end = line.data() + line.size();
  for (double& x : row) {
    while (p < end && *p == ' ') ++p;
    auto [next, ec] = std::from_chars(p, end, x);
    if (ec != std::errc()) {
      throw Error(ErrorCode::kParse, "bad number in checkpoint row '" + label + "'");
    }
    p = next;
  }
}

}  // namespace

void SaveCheckpoint(const EmbeddingModel& model, const KnowledgeGraph& graph,
                    std::ostream& out) {
  if (graph.num_entities() != model.num_entities() ||
      graph.num_relations() != model.num_relations()) {
    throw Error(ErrorCode::kFailedPrecondition,
                "model tables do not match the graph vocabulary");
  }
  const ModelShape& s = model.shape();
  out << "kgepb-checkpoint 1\n"
      << "kind " << ModelKindName(s.kind) << '\n'
      << "dim " << s.dim << '\n'
      << "margin ";
  WriteDouble(out, s.margin);
  out << '\n'
      << "norm " << s.norm_order << '\n'
      << "entities " << model.num_entities() << '\n'
      << "relations " << model.num_relations() << '\n';
  for (uint32_t i = 0; i < model.num_entities(); ++i) {
    WriteRow(out, 'E', graph.EntityLabel(EntityId{i}), model.Entity(EntityId{i}));
  }
  for (uint32_t i = 0; i < model.num_relations(); ++i) {
    WriteRow(out, 'R', graph.RelationLabel(RelationId{i}),
             model.Relation(RelationId{i}));
  }
}

EmbeddingModel LoadCheckpoint(std::istream& in, const KnowledgeGraph& graph) {
  std::string line;
  auto next_line = [&]() -> std::string& {
    do {
      if (!std::getline(in, line)) {
        throw Error(ErrorCode::kParse, "truncated checkpoint");
      }
    } while (!line.empty() && line[0] == '#');
    return line;
  };
  auto field = [&](std::string_view key) {
    std::istringstream row(next_line());
    std::string name, value;
    row >> name >> value;
    if (name != key) {
      throw Error(ErrorCode::kParse, "checkpoint: expected '" + std::string(key) + "'");
    }
    return value;
  };

  if (next_line() != "kgepb-checkpoint 1") {
    throw Error(ErrorCode::kParse, "not a kgepb checkpoint (version 1)");
  }
  ModelShape shape;
  shape.kind = ParseModelKind(field("kind"));
  shape.dim = std::stoul(field("dim"));
  shape.margin = std::stod(field("margin"));
  shape.norm_order = std::stoi(field("norm"));
  const size_t num_entities = std::stoul(field("entities"));
  const size_t num_relations = std::stoul(field("relations"));
  if (num_entities != graph.num_entities() ||
      num_relations != graph.num_relations()) {
    throw Error(ErrorCode::kFailedPrecondition,
                "checkpoint vocabulary size does not match the graph");
  }
  EmbeddingModel model(shape, num_entities, num_relations);
  for (uint32_t i = 0; i < num_entities; ++i) {
    ReadRow(next_line(), 'E', graph.EntityLabel(EntityId{i}),
            model.MutableEntity(EntityId{i}));
  }
  for (uint32_t i = 0; i < num_relations; ++i) {
    ReadRow(next_line(), 'R', graph.RelationLabel(RelationId{i}),
            model.MutableRelation(RelationId{i}));
  }
  return model;
}

}  // namespace kgepb
