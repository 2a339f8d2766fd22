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

// Python bindings. Entities, relations and triples cross the boundary as
// labels.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "kgepb/attack.h"
#include "kgepb/error.h"
#include "kgepb/ingest.h"
#include "kgepb/metrics.h"
#include "kgepb/pipeline.h"
#include "kgepb/random.h"
#include "kgepb/ranker.h"
#include "kgepb/sanitize.h"
#include "kgepb/train.h"

namespace py = pybind11;

namespace kgepb {
namespace {

using GraphPtr = std::shared_ptr<KnowledgeGraph>;
using LabelTriple = std::tuple<std::string, std::string, std::string>;

struct PyModel {
  GraphPtr graph;
  EmbeddingModel model;
};

EntityId Entity(const KnowledgeGraph& g, const std::string& label) {
  const auto id = g.FindEntity(label);
  if (!id) throw Error(ErrorCode::kNotFound, "unknown entity '" + label + "'");
  return *id;
}

RelationId Relation(const KnowledgeGraph& g, const std::string& label) {
  return g.RelationOrDie(label);
}

Triple ToTriple(const KnowledgeGraph& g, const LabelTriple& t) {
  return {Entity(g, std::get<0>(t)), Relation(g, std::get<1>(t)), Entity(g, std::get<2>(t))};
}

LabelTriple ToLabels(const KnowledgeGraph& g, const Triple& t) {
  return {g.EntityLabel(t.head), g.RelationLabel(t.relation), g.EntityLabel(t.tail)};
}

Role ParseRole(const std::string& name) {
  for (Role r : {Role::kUser, Role::kItem, Role::kAttributeValue, Role::kOther}) {
    if (RoleName(r) == name) return r;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown role '" + name + "'");
}

GraphPtr FromTriples(const std::vector<LabelTriple>& triples) {
  auto g = std::make_shared<KnowledgeGraph>();
  for (const auto& [h, r, t] : triples) g->AddTriple(h, r, t);
  return g;
}

std::vector<std::pair<std::string, double>> Ranked(const KnowledgeGraph& g,
                                                   const std::vector<EntityId>& items,
                                                   const std::vector<double>& scores) {
  std::vector<std::pair<std::string, double>> out;
  for (size_t i = 0; i < items.size(); ++i) out.emplace_back(g.EntityLabel(items[i]), scores[i]);
  return out;
}

py::dict RowDict(const TradeoffRow& row) {
  py::dict d;
  d["K"] = row.point.k;
  d["variant"] = std::string(VariantName(row.point.variant));
  d["column"] = row.point.ColumnLabel();
  d["t"] = row.point.keep_top;
  d["r"] = row.point.random_count;
  d["iu_mean"] = row.iu.mean;
  d["iu_std"] = row.iu.std;
  d["qu_mean"] = row.qu.mean;
  d["qu_std"] = row.qu.std;
  d["iu_runs"] = row.iu_runs;
  d["qu_runs"] = row.qu_runs;
  return d;
}

void BindTrainConfig(py::module_& m) {
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_static("recommender_defaults", &DefaultRecommenderTrainConfig)
      .def_static("attack_defaults", &DefaultAttackTrainConfig)
      .def_property(
          "model", [](const TrainConfig& c) { return std::string(ModelKindName(c.kind)); },
          [](TrainConfig& c, const std::string& s) { c.kind = ParseModelKind(s); })
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("negatives", &TrainConfig::negatives)
      .def_readwrite("alpha", &TrainConfig::adversarial_temperature)
      .def_readwrite("gamma", &TrainConfig::margin)
      .def_readwrite("norm_order", &TrainConfig::norm_order)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("parallel", &TrainConfig::parallel)
      .def_readwrite("workers", &TrainConfig::workers)
      .def("validate", &TrainConfig::Validate);
}

void BindAttackSetup(py::module_& m) {
  py::class_<AttackSetup>(m, "AttackSetup")
      .def(py::init<>())
      .def_readwrite("sensitive_relation", &AttackSetup::sensitive_relation)
      .def_readwrite("target_fraction", &AttackSetup::target_fraction)
      .def_readwrite("aux_genres", &AttackSetup::aux_genres)
      .def_readwrite("train", &AttackSetup::train)
      .def_readwrite("seed", &AttackSetup::seed);
}

void BindGraph(py::module_& m) {
  py::class_<KnowledgeGraph, GraphPtr>(m, "Graph")
      .def(py::init([]() { return std::make_shared<KnowledgeGraph>(); }))
      .def_static("from_triples", &FromTriples, py::arg("triples"))
      .def_static(
          "load",
          [](const std::filesystem::path& path) {
            return std::make_shared<KnowledgeGraph>(LoadDataset(DetectDataset(path)));
          },
          py::arg("path"), "Loads a MovieLens 100K directory or a triple file.")
      .def("add", py::overload_cast<std::string_view, std::string_view, std::string_view>(
                      &KnowledgeGraph::AddTriple),
           py::arg("head"), py::arg("relation"), py::arg("tail"))
      .def_property_readonly("num_entities", &KnowledgeGraph::num_entities)
      .def_property_readonly("num_relations", &KnowledgeGraph::num_relations)
      .def_property_readonly("num_triples", &KnowledgeGraph::num_triples)
      .def("__len__", &KnowledgeGraph::num_triples)
      .def("__contains__",
           [](const KnowledgeGraph& g, const LabelTriple& t) {
             const auto h = g.FindEntity(std::get<0>(t));
             const auto r = g.FindRelation(std::get<1>(t));
             const auto tl = g.FindEntity(std::get<2>(t));
             return h && r && tl && g.Contains({*h, *r, *tl});
           })
      .def("triples",
           [](const KnowledgeGraph& g) {
             std::vector<LabelTriple> out;
             for (const Triple& t : g.triples()) out.push_back(ToLabels(g, t));
             return out;
           })
      .def(
          "entities",
          [](const KnowledgeGraph& g, const std::optional<std::string>& role) {
            std::vector<std::string> out;
            if (role) {
              for (EntityId e : g.EntitiesWithRole(ParseRole(*role))) {
                out.push_back(g.EntityLabel(e));
              }
              return out;
            }
            for (uint32_t i = 0; i < g.num_entities(); ++i) {
              out.push_back(g.EntityLabel(EntityId{i}));
            }
            return out;
          },
          py::arg("role") = py::none())
      .def("relations",
           [](const KnowledgeGraph& g) {
             std::vector<std::string> out;
             for (uint32_t i = 0; i < g.num_relations(); ++i) {
               out.push_back(g.RelationLabel(RelationId{i}));
             }
             return out;
           })
      .def("role",
           [](const KnowledgeGraph& g, const std::string& e) {
             return std::string(RoleName(g.EntityRole(Entity(g, e))));
           })
      .def("tails",
           [](const KnowledgeGraph& g, const std::string& head, const std::string& relation) {
             std::vector<std::string> out;
             for (EntityId t : g.Tails(Entity(g, head), Relation(g, relation))) {
               out.push_back(g.EntityLabel(t));
             }
             return out;
           })
      .def(
          "split",
          [](const KnowledgeGraph& g, double holdout, uint64_t seed,
             const std::string& relation) {
            Split s = SplitInteractions(g, Relation(g, relation), holdout, seed);
            std::vector<LabelTriple> held;
            for (const Triple& t : s.held_out) held.push_back(ToLabels(g, t));
            return std::make_pair(std::make_shared<KnowledgeGraph>(std::move(s.train)), held);
          },
          py::arg("holdout") = 0.2, py::arg("seed") = 1,
          py::arg("relation") = std::string(relations::kInteractedWith),
          "Per-user holdout; returns (train_graph, held_out_triples).")
      .def("to_tsv", [](const KnowledgeGraph& g) {
        std::ostringstream out;
        WriteTriples(g, out);
        return out.str();
      });
}

void BindModel(py::module_& m) {
  py::class_<PyModel>(m, "Model")
      .def_property_readonly("graph", [](const PyModel& p) { return p.graph; })
      .def_property_readonly("model",
                             [](const PyModel& p) { return std::string(ModelKindName(p.model.shape().kind)); })
      .def_property_readonly("dim", [](const PyModel& p) { return p.model.shape().dim; })
      .def_property_readonly("gamma", [](const PyModel& p) { return p.model.shape().margin; })
      .def("score",
           [](const PyModel& p, const std::string& h, const std::string& r, const std::string& t) {
             return p.model.Score(ToTriple(*p.graph, {h, r, t}));
           })
      .def("plausibility",
           [](const PyModel& p, const std::string& h, const std::string& r, const std::string& t) {
             return p.model.Plausibility(ToTriple(*p.graph, {h, r, t}));
           })
      .def("entity_vector",
           [](const PyModel& p, const std::string& e) {
             const auto row = p.model.Entity(Entity(*p.graph, e));
             return std::vector<double>(row.begin(), row.end());
           })
      .def("relation_vector",
           [](const PyModel& p, const std::string& r) {
             const auto row = p.model.Relation(Relation(*p.graph, r));
             return std::vector<double>(row.begin(), row.end());
           })
      .def(
          "top_k",
          [](const PyModel& p, const std::string& user, size_t k, const std::string& relation) {
            const RecommendationList list =
                TopK(p.model, *p.graph, Entity(*p.graph, user), Relation(*p.graph, relation), k);
            return Ranked(*p.graph, list.items, list.scores);
          },
          py::arg("user"), py::arg("k") = 10,
          py::arg("relation") = std::string(relations::kInteractedWith),
          "Items the user has no known interaction with, best first.")
      .def(
          "hits_at_k",
          [](const PyModel& p, const std::vector<LabelTriple>& held_out, size_t k) {
            std::vector<Triple> triples;
            for (const auto& t : held_out) triples.push_back(ToTriple(*p.graph, t));
            py::gil_scoped_release release;
            return HitsAtK(p.model, triples, k, *p.graph);
          },
          py::arg("held_out"), py::arg("k"))
      .def(
          "save",
          [](const PyModel& p, const std::filesystem::path& path) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
            SaveCheckpoint(p.model, *p.graph, out);
          },
          py::arg("path"))
      .def_static(
          "load",
          [](const std::filesystem::path& path, GraphPtr graph) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
            return PyModel{graph, LoadCheckpoint(in, *graph)};
          },
          py::arg("path"), py::arg("graph"));
}

}  // namespace
}  // namespace kgepb

PYBIND11_MODULE(_core, m) {
  using namespace kgepb;
  m.doc() = "Knowledge-graph embedding recommender privacy workbench";
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  BindTrainConfig(m);
  BindAttackSetup(m);
  BindGraph(m);
  BindModel(m);

  m.def(
      "train",
      [](GraphPtr graph, const TrainConfig& config) {
        EmbeddingModel model;
        {
          py::gil_scoped_release release;
          model = Train(*graph, config);
        }
        return PyModel{graph, std::move(model)};
      },
      py::arg("graph"), py::arg("config") = DefaultRecommenderTrainConfig());

  m.def(
      "sanitize",
      [](const PyModel& p, const std::string& user, size_t keep_top, size_t random_count,
         bool shuffle, size_t shuffle_window, uint64_t seed, const std::string& relation) {
        const KnowledgeGraph& g = *p.graph;
        const RelationId rel = Relation(g, relation);
        const size_t k = keep_top + random_count;
        const RecommendationList ranked =
            TopK(p.model, g, Entity(g, user), rel, std::max(k, shuffle_window));
        SanitizeConfig config{keep_top, random_count, shuffle, shuffle_window, seed};
        const std::vector<SanitizedList> out = SanitizeAll({&ranked, 1}, g, p.model, rel, config);
        py::list rows;
        for (size_t i = 0; i < out[0].size(); ++i) {
          rows.append(py::make_tuple(g.EntityLabel(out[0].items[i]), out[0].scores[i],
                                     std::string(ProvenanceName(out[0].provenance[i]))));
        }
        return rows;
      },
      py::arg("model"), py::arg("user"), py::arg("keep_top"), py::arg("random_count"),
      py::arg("shuffle") = false, py::arg("shuffle_window") = 10, py::arg("seed") = 0,
      py::arg("relation") = std::string(relations::kInteractedWith),
      "Sanitized list of (item, score, provenance) for one user.");

  m.def(
      "list_utility",
      [](const PyModel& p, const std::string& user, const std::vector<std::string>& top_k,
         const std::vector<std::string>& sanitized, const std::string& relation) {
        std::vector<EntityId> top;
        std::vector<EntityId> san;
        for (const auto& e : top_k) top.push_back(Entity(*p.graph, e));
        for (const auto& e : sanitized) san.push_back(Entity(*p.graph, e));
        return ListUtility(p.model, Entity(*p.graph, user), Relation(*p.graph, relation), top,
                           san);
      },
      py::arg("model"), py::arg("user"), py::arg("top_k"), py::arg("sanitized"),
      py::arg("relation") = std::string(relations::kInteractedWith));

  m.def(
      "attack",
      [](GraphPtr graph, const std::map<std::string, std::vector<std::string>>& released_lists,
         const AttackSetup& setup) {
        const KnowledgeGraph& g = *graph;
        std::vector<ReleasedList> released;
        std::vector<EntityId> users;
        const RelationId sensitive = Relation(g, setup.sensitive_relation);
        for (const auto& [user, items] : released_lists) {
          ReleasedList list{Entity(g, user), {}};
          for (const auto& item : items) list.items.push_back(Entity(g, item));
          if (!g.Tails(list.user, sensitive).empty()) users.push_back(list.user);
          released.push_back(std::move(list));
        }
        std::sort(users.begin(), users.end());
        const UserPartition partition =
            SplitAttackUsers(users, setup.target_fraction, DeriveSeed(setup.seed, "targets"));
        AttackResult result;
        {
          py::gil_scoped_release release;
          result = RunAttack(released, g, setup, partition);
        }
        py::dict out;
        out["success_rate"] = result.success_rate;
        out["degenerate"] = result.degenerate;
        py::list inferences;
        for (const UserInference& inf : result.inferences) {
          py::dict d;
          d["user"] = g.EntityLabel(inf.user);
          d["true_value"] = g.EntityLabel(inf.true_value);
          d["predicted"] = g.EntityLabel(inf.ranking.front().entity);
          d["success"] = inf.success;
          inferences.append(d);
        }
        out["inferences"] = inferences;
        return out;
      },
      py::arg("graph"), py::arg("released"), py::arg("setup") = AttackSetup{},
      "Attribute-inference attack on released lists {user: [items]}; "
      "targets are drawn from setup.seed.");

  m.def(
      "tradeoff",
      [](const PyModel& p, size_t runs, uint64_t seed, const std::vector<size_t>& grid_k,
         const AttackSetup& attack, size_t workers) {
        std::vector<TradeoffPoint> points;
        for (const TradeoffPoint& point : StandardGrid()) {
          if (std::find(grid_k.begin(), grid_k.end(), point.k) != grid_k.end()) {
            points.push_back(point);
          }
        }
        SweepOptions options;
        options.runs = runs;
        options.seed = seed;
        options.attack = attack;
        options.workers = workers;
        std::vector<TradeoffRow> rows;
        {
          py::gil_scoped_release release;
          rows = TradeoffSweep(*p.graph, p.model, points, options);
        }
        py::list out;
        for (const TradeoffRow& row : rows) out.append(RowDict(row));
        return out;
      },
      py::arg("model"), py::arg("runs") = 5, py::arg("seed") = 0,
      py::arg("grid_k") = std::vector<size_t>{5, 10}, py::arg("attack") = AttackSetup{},
      py::arg("workers") = 1, "Mean and std of I_u and Q_u over the standard grid.");

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("data_dir", &ExperimentConfig::data_dir)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("dataset_name", &ExperimentConfig::dataset_name)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("holdout", &ExperimentConfig::holdout)
      .def_readwrite("recommender", &ExperimentConfig::recommender)
      .def_readwrite("attack", &ExperimentConfig::attack)
      .def_readwrite("k", &ExperimentConfig::k)
      .def_readwrite("keep_top", &ExperimentConfig::keep_top)
      .def_readwrite("random_count", &ExperimentConfig::random_count)
      .def_readwrite("shuffle", &ExperimentConfig::shuffle)
      .def_readwrite("shuffle_window", &ExperimentConfig::shuffle_window)
      .def_readwrite("exclude_history", &ExperimentConfig::exclude_history)
      .def_readwrite("runs", &ExperimentConfig::runs)
      .def_readwrite("grid_k", &ExperimentConfig::grid_k)
      .def_readwrite("deterministic", &ExperimentConfig::deterministic)
      .def_readwrite("workers", &ExperimentConfig::workers)
      .def("validate", &ExperimentConfig::Validate);

  m.def(
      "run_stage",
      [](const std::string& stage, const ExperimentConfig& config) {
        std::ostringstream log;
        {
          py::gil_scoped_release release;
          RunStage(ParseStage(stage), config, log);
        }
        return log.str();
      },
      py::arg("stage"), py::arg("config"),
      "Runs one pipeline stage against config.out_dir and returns its log.");
}
