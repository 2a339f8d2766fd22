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

#include "kgepb/pipeline.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "kgepb/error.h"
#include "kgepb/ingest.h"
#include "kgepb/random.h"
#include "kgepb/ranker.h"
#include "kgepb/sanitize.h"

namespace kgepb {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStageNames[] = {"ingest",   "train",  "recommend",
                                            "sanitize", "attack", "tradeoff",
                                            "export"};

constexpr char kGraphFile[] = "graph.tsv";
constexpr char kTrainGraphFile[] = "train_graph.tsv";
constexpr char kHeldOutFile[] = "heldout.tsv";
constexpr char kCheckpointFile[] = "recommender.ckpt";
constexpr char kTrainMetricsFile[] = "train_metrics.csv";
constexpr char kRecommendationsFile[] = "recommendations.tsv";
constexpr char kSanitizedFile[] = "sanitized.tsv";
constexpr char kAttackFile[] = "attack_results.csv";
constexpr char kTradeoffFile[] = "tradeoff.csv";
constexpr char kTradeoffLongFile[] = "tradeoff_long.csv";
constexpr char kExportDir[] = "export";

std::string Shortest(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

class Hasher {
 public:
  explicit Hasher(uint64_t seed = 0xcbf29ce484222325ULL) : h_(seed) {}

  Hasher& Add(std::string_view key, std::string_view value) {
    Bytes(key);
    Bytes("=");
    Bytes(value);
    Bytes("\n");
    return *this;
  }
  Hasher& Add(std::string_view key, double value) { return Add(key, Shortest(value)); }
  Hasher& Add(std::string_view key, uint64_t value) {
    return Add(key, std::to_string(value));
  }
  Hasher& Add(std::string_view key, size_t value, int) {
    return Add(key, static_cast<uint64_t>(value));
  }
  Hasher& Add(std::string_view key, bool value, char) {
    return Add(key, value ? std::string_view("on") : std::string_view("off"));
  }
  uint64_t value() const { return h_; }

 private:
  void Bytes(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  uint64_t h_;
};

void AddTrainConfig(Hasher& h, std::string_view prefix, const TrainConfig& c) {
  const std::string p(prefix);
  h.Add(p + "model", ModelKindName(c.kind))
      .Add(p + "dim", c.dim, 0)
      .Add(p + "epochs", c.epochs, 0)
      .Add(p + "batch", c.batch_size, 0)
      .Add(p + "lr", c.learning_rate)
      .Add(p + "negatives", c.negatives, 0)
      .Add(p + "alpha", c.adversarial_temperature)
      .Add(p + "gamma", c.margin)
      .Add(p + "norm", static_cast<uint64_t>(c.norm_order));
}

void AddAttackSetup(Hasher& h, const AttackSetup& a) {
  h.Add("sensitive", a.sensitive_relation)
      .Add("target-fraction", a.target_fraction)
      .Add("aux-genres", a.aux_genres, 'b');
  AddTrainConfig(h, "attack-", a.train);
}

bool ParallelTraining(const ExperimentConfig& c) {
  return !c.deterministic && c.workers > 1;
}

// Creates parent directories and writes atomically via a temporary file.
class ArtifactWriter {
 public:
  ArtifactWriter(const fs::path& path, const ArtifactHeader& header)
      : path_(path), tmp_(path.string() + ".tmp") {
    fs::create_directories(path_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorCode::kIo, "cannot write " + tmp_.string());
    out_ << FormatArtifactHeader(header) << '\n';
  }

  std::ostream& out() { return out_; }

  void Commit() {
    out_.close();
    if (!out_) throw Error(ErrorCode::kIo, "failed writing " + tmp_.string());
    fs::rename(tmp_, path_);
  }

 private:
  fs::path path_;
  fs::path tmp_;
  std::ofstream out_;
};

ArtifactHeader HeaderFor(const ExperimentConfig& config, Stage stage) {
  return {stage, StageConfigHash(config, stage), config.seed};
}

// Checks that `file` exists and was produced by `producer` under the
// current configuration.
fs::path RequireArtifact(const ExperimentConfig& config, Stage producer,
                         const std::string& file) {
  const fs::path path = config.out_dir / file;
  const std::string stage(StageName(producer));
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kFailedPrecondition,
                "missing " + path.string() + "; run stage '" + stage + "' first");
  }
  const auto header = ReadArtifactHeader(path);
  if (!header || header->stage != producer) {
    throw Error(ErrorCode::kFailedPrecondition,
                path.string() + " has no valid '" + stage + "' header; rerun stage '" +
                    stage + "'");
  }
  const uint64_t expected = StageConfigHash(config, producer);
  if (header->config_hash != expected || header->seed != config.seed) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "config_hash=%016llx, current %016llx",
                  static_cast<unsigned long long>(header->config_hash),
                  static_cast<unsigned long long>(expected));
    throw Error(ErrorCode::kFailedPrecondition,
                path.string() + " was produced with a different configuration (" +
                    buf + "); rerun stage '" + stage + "'");
  }
  return path;
}

std::ifstream OpenForRead(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

KnowledgeGraph ReadGraphArtifact(const ExperimentConfig& config, Stage producer,
                                 const std::string& file) {
  const fs::path path = RequireArtifact(config, producer, file);
  std::ifstream in = OpenForRead(path);
  return ReadTriples(in, path.filename().string());
}

struct TrainedState {
  KnowledgeGraph graph;
  EmbeddingModel model;
};

TrainedState LoadTrained(const ExperimentConfig& config) {
  TrainedState state;
  state.graph = ReadGraphArtifact(config, Stage::kTrain, kTrainGraphFile);
  const fs::path ckpt = RequireArtifact(config, Stage::kTrain, kCheckpointFile);
  std::ifstream in = OpenForRead(ckpt);
  state.model = LoadCheckpoint(in, state.graph);
  return state;
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

// Reads per-user item lists from a `user<TAB>position<TAB>item...` file,
// keeping file order.
std::vector<ReleasedList> ReadListFile(const fs::path& path, const KnowledgeGraph& graph) {
  std::ifstream in = OpenForRead(path);
  std::vector<ReleasedList> lists;
  std::map<EntityId, size_t> index;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto f = SplitTabs(line);
    if (f.size() < 3) {
      throw Error(ErrorCode::kParse, path.filename().string() + ":" +
                                         std::to_string(line_no) + ": too few fields");
    }
    if (f[0] == "user") continue;  // column header
    const auto user = graph.FindEntity(f[0]);
    const auto item = graph.FindEntity(f[2]);
    if (!user || !item) {
      throw Error(ErrorCode::kParse, path.filename().string() + ":" +
                                         std::to_string(line_no) + ": unknown entity");
    }
    auto [it, inserted] = index.emplace(*user, lists.size());
    if (inserted) lists.push_back({*user, {}});
    lists[it->second].items.push_back(*item);
  }
  return lists;
}

void RunIngest(const ExperimentConfig& config, std::ostream& log) {
  const KnowledgeGraph graph = LoadDataset(DetectDataset(config.data_dir));
  ArtifactWriter writer(config.out_dir / kGraphFile, HeaderFor(config, Stage::kIngest));
  WriteTriples(graph, writer.out());
  writer.Commit();
  log << "ingest: " << graph.num_entities() << " entities, " << graph.num_relations()
      << " relations, " << graph.num_triples() << " triples -> "
      << (config.out_dir / kGraphFile).string() << '\n';
}

TrainReport TrainStage(const ExperimentConfig& config, std::ostream& log) {
  const KnowledgeGraph graph = ReadGraphArtifact(config, Stage::kIngest, kGraphFile);
  const RelationId interacted = graph.RelationOrDie(relations::kInteractedWith);
  const Split split = SplitInteractions(graph, interacted, config.holdout, config.seed);
  if (!split.single_interaction_users.empty()) {
    log << "train: warning: " << split.single_interaction_users.size()
        << " users with a single interaction keep it in training\n";
  }

  const ArtifactHeader header = HeaderFor(config, Stage::kTrain);
  std::string serialized;
  {
    std::ostringstream out;
    WriteTriples(split.train, out);
    serialized = out.str();
  }
  // Train on the graph exactly as later stages will read it back.
  std::istringstream reread(serialized);
  const KnowledgeGraph train_graph = ReadTriples(reread, kTrainGraphFile);

  std::vector<Triple> held_out;
  size_t dropped = 0;
  for (const Triple& t : split.held_out) {
    const auto head = train_graph.FindEntity(graph.EntityLabel(t.head));
    const auto tail = train_graph.FindEntity(graph.EntityLabel(t.tail));
    const auto rel = train_graph.FindRelation(graph.RelationLabel(t.relation));
    if (head && tail && rel) {
      held_out.push_back({*head, *rel, *tail});
    } else {
      ++dropped;
    }
  }

  TrainConfig train = config.recommender;
  train.seed = StageSeed(config, Stage::kTrain);
  train.parallel = ParallelTraining(config);
  train.workers = config.workers;
  std::vector<EpochStats> epochs;
  const EmbeddingModel model = Train(train_graph, train, [&](const EpochStats& s) {
    epochs.push_back(s);
    if (s.epoch % 10 == 0 || s.epoch + 1 == train.epochs) {
      log << "train: epoch " << s.epoch << " loss " << Shortest(s.mean_loss) << '\n';
    }
  });

  {
    ArtifactWriter writer(config.out_dir / kTrainGraphFile, header);
    writer.out() << serialized;
    writer.Commit();
  }
  {
    ArtifactWriter writer(config.out_dir / kHeldOutFile, header);
    for (const Triple& t : split.held_out) {
      writer.out() << graph.EntityLabel(t.head) << '\t' << graph.RelationLabel(t.relation)
                   << '\t' << graph.EntityLabel(t.tail) << '\n';
    }
    writer.Commit();
  }
  {
    ArtifactWriter writer(config.out_dir / kCheckpointFile, header);
    SaveCheckpoint(model, train_graph, writer.out());
    writer.Commit();
  }
  TrainReport report;
  report.held_out = held_out.size();
  {
    ArtifactWriter writer(config.out_dir / kTrainMetricsFile, header);
    std::ostream& out = writer.out();
    out << "metric,epoch,value\n";
    for (const EpochStats& s : epochs) {
      out << "loss," << s.epoch << ',' << Shortest(s.mean_loss) << '\n';
    }
    if (!held_out.empty()) {
      report.hits_at_5 = HitsAtK(model, held_out, 5, train_graph);
      report.hits_at_10 = HitsAtK(model, held_out, 10, train_graph);
      for (auto [k, hits] : {std::pair{5, report.hits_at_5}, std::pair{10, report.hits_at_10}}) {
        out << "hits@" << k << ",," << Shortest(hits) << '\n';
        log << "train: hits@" << k << " = " << Shortest(hits) << '\n';
      }
    }
    writer.Commit();
  }
  if (dropped > 0) {
    log << "train: " << dropped
        << " held-out triples reference entities absent from training; skipped\n";
  }
  log << "train: " << held_out.size() << " held-out triples, checkpoint -> "
      << (config.out_dir / kCheckpointFile).string() << '\n';
  return report;
}

void RunRecommend(const ExperimentConfig& config, std::ostream& log) {
  const TrainedState state = LoadTrained(config);
  const RelationId interacted = state.graph.RelationOrDie(relations::kInteractedWith);
  const auto lists = TopKForAllUsers(state.model, state.graph, interacted, config.k);
  ArtifactWriter writer(config.out_dir / kRecommendationsFile,
                        HeaderFor(config, Stage::kRecommend));
  writer.out() << "user\trank\titem\tscore\n";
  for (const RecommendationList& list : lists) {
    for (size_t i = 0; i < list.items.size(); ++i) {
      writer.out() << state.graph.EntityLabel(list.user) << '\t' << i + 1 << '\t'
                   << state.graph.EntityLabel(list.items[i]) << '\t'
                   << Shortest(list.scores[i]) << '\n';
    }
  }
  writer.Commit();
  log << "recommend: top-" << config.k << " for " << lists.size() << " users -> "
      << (config.out_dir / kRecommendationsFile).string() << '\n';
}

void RunSanitize(const ExperimentConfig& config, std::ostream& log) {
  RequireArtifact(config, Stage::kRecommend, kRecommendationsFile);
  const TrainedState state = LoadTrained(config);
  const RelationId interacted = state.graph.RelationOrDie(relations::kInteractedWith);

  SanitizeConfig sanitize;
  sanitize.keep_top = config.KeepTop();
  sanitize.random_count = config.random_count;
  sanitize.shuffle = config.shuffle;
  sanitize.shuffle_window = config.shuffle_window;
  sanitize.exclude_history = config.exclude_history;
  sanitize.seed = StageSeed(config, Stage::kSanitize);
  const auto ranked = TopKForAllUsers(state.model, state.graph, interacted,
                                      std::max(config.k, config.shuffle_window));
  const auto lists = SanitizeAll(ranked, state.graph, state.model, interacted, sanitize);

  ArtifactWriter writer(config.out_dir / kSanitizedFile, HeaderFor(config, Stage::kSanitize));
  writer.out() << "user\tposition\titem\tscore\tprovenance\n";
  for (const SanitizedList& list : lists) {
    for (size_t i = 0; i < list.size(); ++i) {
      writer.out() << state.graph.EntityLabel(list.user) << '\t' << i + 1 << '\t'
                   << state.graph.EntityLabel(list.items[i]) << '\t'
                   << Shortest(list.scores[i]) << '\t'
                   << ProvenanceName(list.provenance[i]) << '\n';
    }
  }
  writer.Commit();
  log << "sanitize: t=" << sanitize.keep_top << " r=" << sanitize.random_count
      << (sanitize.shuffle ? " shuffled" : "") << " for " << lists.size() << " users -> "
      << (config.out_dir / kSanitizedFile).string() << '\n';
}

void RunAttackStage(const ExperimentConfig& config, std::ostream& log) {
  const fs::path sanitized = RequireArtifact(config, Stage::kSanitize, kSanitizedFile);
  const KnowledgeGraph graph = ReadGraphArtifact(config, Stage::kTrain, kTrainGraphFile);
  const std::vector<ReleasedList> released = ReadListFile(sanitized, graph);
  const RelationId sensitive = graph.RelationOrDie(config.attack.sensitive_relation);

  std::vector<EntityId> attackable;
  for (const ReleasedList& list : released) {
    if (!graph.Tails(list.user, sensitive).empty()) attackable.push_back(list.user);
  }
  std::sort(attackable.begin(), attackable.end());
  const UserPartition partition =
      SplitAttackUsers(attackable, config.attack.target_fraction,
                       DeriveSeed(StageSeed(config, Stage::kAttack), "targets"));
  AttackSetup setup = config.attack;
  setup.seed = StageSeed(config, Stage::kAttack);
  setup.train.parallel = ParallelTraining(config);
  setup.train.workers = config.workers;
  const AttackResult result = RunAttack(released, graph, setup, partition);

  ArtifactWriter writer(config.out_dir / kAttackFile, HeaderFor(config, Stage::kAttack));
  writer.out() << "user,true_value,predicted,success\n";
  for (const UserInference& inference : result.inferences) {
    writer.out() << graph.EntityLabel(inference.user) << ','
                 << graph.EntityLabel(inference.true_value) << ','
                 << graph.EntityLabel(inference.ranking.front().entity) << ','
                 << (inference.success ? 1 : 0) << '\n';
  }
  char rate[32];
  std::snprintf(rate, sizeof(rate), "%.6f", result.success_rate);
  writer.out() << "summary,,," << rate << '\n';
  writer.Commit();
  log << "attack: I_u = " << rate << " over " << result.inferences.size() << " targets"
      << (result.degenerate ? " (degenerate: one candidate value)" : "") << " -> "
      << (config.out_dir / kAttackFile).string() << '\n';
}

std::vector<TradeoffRow> TradeoffStage(const ExperimentConfig& config, std::ostream& log,
                                       const SweepListObserver& observer) {
  const TrainedState state = LoadTrained(config);
  std::vector<TradeoffPoint> points;
  for (const TradeoffPoint& p : StandardGrid()) {
    if (std::find(config.grid_k.begin(), config.grid_k.end(), p.k) != config.grid_k.end()) {
      points.push_back(p);
    }
  }
  if (points.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "trade-off grid is empty; use K in {5, 10}");
  }
  SweepOptions options;
  options.runs = config.runs;
  options.seed = StageSeed(config, Stage::kTradeoff);
  options.attack = config.attack;
  options.attack.train.parallel = false;
  options.shuffle_window = config.shuffle_window;
  options.exclude_history = config.exclude_history;
  options.utility = config.utility;
  options.workers = config.deterministic ? 1 : config.workers;
  log << "tradeoff: " << points.size() << " points x " << config.runs << " runs\n";
  const auto rows = TradeoffSweep(state.graph, state.model, points, options, observer);

  const ArtifactHeader header = HeaderFor(config, Stage::kTradeoff);
  {
    ArtifactWriter writer(config.out_dir / kTradeoffFile, header);
    WriteTradeoffCsv(rows, config.DatasetName(), writer.out());
    writer.Commit();
  }
  {
    ArtifactWriter writer(config.out_dir / kTradeoffLongFile, header);
    WriteTradeoffLongCsv(rows, config.DatasetName(), writer.out());
    writer.Commit();
  }
  for (const TradeoffRow& row : rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "  K=%zu %-6s %-6s I_u %.3f +- %.3f  Q_u %.3f\n",
                  row.point.k, std::string(VariantName(row.point.variant)).c_str(),
                  row.point.ColumnLabel().c_str(), row.iu.mean, row.iu.std, row.qu.mean);
    log << line;
  }
  log << "tradeoff: -> " << (config.out_dir / kTradeoffFile).string() << '\n';
  return rows;
}

void RunExport(const ExperimentConfig& config, std::ostream& log) {
  const TrainedState state = LoadTrained(config);
  const ArtifactHeader header = HeaderFor(config, Stage::kExport);
  const fs::path dir = config.out_dir / kExportDir;
  {
    ArtifactWriter writer(dir / "triples.tsv", header);
    WriteTriples(state.graph, writer.out());
    writer.Commit();
  }
  auto write_rows = [&](std::ostream& out, std::span<const double> row) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << Shortest(row[i]);
    out << '\n';
  };
  {
    ArtifactWriter writer(dir / "entities.tsv", header);
    writer.out() << "label\trole\tvector\n";
    for (uint32_t i = 0; i < state.graph.num_entities(); ++i) {
      writer.out() << state.graph.EntityLabel(EntityId{i}) << '\t'
                   << RoleName(state.graph.EntityRole(EntityId{i})) << '\t';
      write_rows(writer.out(), state.model.Entity(EntityId{i}));
    }
    writer.Commit();
  }
  {
    ArtifactWriter writer(dir / "relations.tsv", header);
    writer.out() << "label\tvector\n";
    for (uint32_t i = 0; i < state.graph.num_relations(); ++i) {
      writer.out() << state.graph.RelationLabel(RelationId{i}) << '\t';
      write_rows(writer.out(), state.model.Relation(RelationId{i}));
    }
    writer.Commit();
  }
  log << "export: " << state.graph.num_entities() << " entity and "
      << state.graph.num_relations() << " relation vectors -> " << dir.string() << '\n';
}

}  // namespace

std::string_view StageName(Stage stage) {
  return kStageNames[static_cast<size_t>(stage)];
}

Stage ParseStage(std::string_view name) {
  for (size_t i = 0; i < std::size(kStageNames); ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown stage '" + std::string(name) + "'");
}

size_t ExperimentConfig::KeepTop() const {
  if (keep_top) return *keep_top;
  if (random_count > k) {
    throw Error(ErrorCode::kInvalidArgument, "random count exceeds K");
  }
  return k - random_count;
}

std::string ExperimentConfig::DatasetName() const {
  if (!dataset_name.empty()) return dataset_name;
  fs::path p = data_dir;
  if (!p.has_filename()) p = p.parent_path();
  return p.has_stem() ? p.stem().string() : std::string("dataset");
}

void ExperimentConfig::Validate() const {
  if (!(holdout > 0.0 && holdout < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "holdout must lie in (0, 1)");
  }
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "K must be positive");
  if (KeepTop() + random_count != k) {
    throw Error(ErrorCode::kInvalidArgument,
                "keep-top + random-count must equal K=" + std::to_string(k));
  }
  if (runs == 0) throw Error(ErrorCode::kInvalidArgument, "runs must be positive");
  if (grid_k.empty()) throw Error(ErrorCode::kInvalidArgument, "empty trade-off grid");
  recommender.Validate();
  attack.train.Validate();
}

uint64_t StageConfigHash(const ExperimentConfig& c, Stage stage) {
  Hasher ingest;
  ingest.Add("stage", "ingest").Add("data-dir", c.data_dir.generic_string());
  if (stage == Stage::kIngest) return ingest.value();

  Hasher train(ingest.value());
  train.Add("stage", "train")
      .Add("seed", c.seed)
      .Add("holdout", c.holdout)
      .Add("parallel", ParallelTraining(c), 'b');
  AddTrainConfig(train, "", c.recommender);
  if (stage == Stage::kTrain) return train.value();

  switch (stage) {
    case Stage::kRecommend:
    case Stage::kSanitize:
    case Stage::kAttack: {
      Hasher h(train.value());
      h.Add("stage", "recommend").Add("k", c.k, 0);
      if (stage == Stage::kRecommend) return h.value();
      h.Add("stage", "sanitize")
          .Add("keep-top", c.KeepTop(), 0)
          .Add("random-count", c.random_count, 0)
          .Add("shuffle", c.shuffle, 'b')
          .Add("shuffle-window", c.shuffle_window, 0)
          .Add("exclude-history", c.exclude_history, 'b');
      if (stage == Stage::kSanitize) return h.value();
      h.Add("stage", "attack");
      AddAttackSetup(h, c.attack);
      return h.value();
    }
    case Stage::kTradeoff: {
      Hasher h(train.value());
      h.Add("stage", "tradeoff")
          .Add("dataset", c.DatasetName())
          .Add("runs", c.runs, 0)
          .Add("shuffle-window", c.shuffle_window, 0)
          .Add("exclude-history", c.exclude_history, 'b')
          .Add("utility", c.utility == UtilityMode::kPlausibility ? "plausibility" : "raw");
      for (size_t k : c.grid_k) h.Add("grid-k", k, 0);
      AddAttackSetup(h, c.attack);
      return h.value();
    }
    case Stage::kExport:
      return Hasher(train.value()).Add("stage", "export").value();
    default:
      break;
  }
  return train.value();
}

uint64_t StageSeed(const ExperimentConfig& config, Stage stage) {
  return DeriveSeed(config.seed, StageName(stage));
}

std::string FormatArtifactHeader(const ArtifactHeader& header) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "# kgepb stage=%s config_hash=%016llx seed=%llu",
                std::string(StageName(header.stage)).c_str(),
                static_cast<unsigned long long>(header.config_hash),
                static_cast<unsigned long long>(header.seed));
  return buf;
}

std::optional<ArtifactHeader> ReadArtifactHeader(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  if (!in || !std::getline(in, line)) return std::nullopt;
  std::istringstream fields(line);
  std::string hash_mark, tool, stage, hash, seed;
  fields >> hash_mark >> tool >> stage >> hash >> seed;
  if (hash_mark != "#" || tool != "kgepb" || !stage.starts_with("stage=") ||
      !hash.starts_with("config_hash=") || !seed.starts_with("seed=")) {
    return std::nullopt;
  }
  ArtifactHeader header;
  try {
    header.stage = ParseStage(stage.substr(6));
  } catch (const Error&) {
    return std::nullopt;
  }
  const std::string_view hex = std::string_view(hash).substr(12);
  const std::string_view dec = std::string_view(seed).substr(5);
  auto r1 = std::from_chars(hex.data(), hex.data() + hex.size(), header.config_hash, 16);
  auto r2 = std::from_chars(dec.data(), dec.data() + dec.size(), header.seed);
  if (r1.ec != std::errc() || r2.ec != std::errc()) return std::nullopt;
  return header;
}

std::vector<std::string> StageArtifacts(Stage stage) {
  switch (stage) {
    case Stage::kIngest:
      return {kGraphFile};
    case Stage::kTrain:
      return {kTrainGraphFile, kHeldOutFile, kCheckpointFile, kTrainMetricsFile};
    case Stage::kRecommend:
      return {kRecommendationsFile};
    case Stage::kSanitize:
      return {kSanitizedFile};
    case Stage::kAttack:
      return {kAttackFile};
    case Stage::kTradeoff:
      return {kTradeoffFile, kTradeoffLongFile};
    case Stage::kExport:
      return {std::string(kExportDir) + "/triples.tsv",
              std::string(kExportDir) + "/entities.tsv",
              std::string(kExportDir) + "/relations.tsv"};
  }
  return {};
}

TrainReport RunTrainStage(const ExperimentConfig& config, std::ostream& log) {
  config.Validate();
  return TrainStage(config, log);
}

std::vector<TradeoffRow> RunTradeoffStage(const ExperimentConfig& config, std::ostream& log,
                                          const SweepListObserver& observer) {
  config.Validate();
  return TradeoffStage(config, log, observer);
}

void RunStage(Stage stage, const ExperimentConfig& config, std::ostream& log) {
  config.Validate();
  switch (stage) {
    case Stage::kIngest:
      return RunIngest(config, log);
    case Stage::kTrain:
      TrainStage(config, log);
      return;
    case Stage::kRecommend:
      return RunRecommend(config, log);
    case Stage::kSanitize:
      return RunSanitize(config, log);
    case Stage::kAttack:
      return RunAttackStage(config, log);
    case Stage::kTradeoff:
      TradeoffStage(config, log, {});
      return;
    case Stage::kExport:
      return RunExport(config, log);
  }
}

}  // namespace kgepb
