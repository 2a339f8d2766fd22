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

#ifndef KGEPB_PIPELINE_H_
#define KGEPB_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgepb/attack.h"
#include "kgepb/metrics.h"
#include "kgepb/train.h"

namespace kgepb {

enum class Stage { kIngest, kTrain, kRecommend, kSanitize, kAttack, kTradeoff, kExport };

std::string_view StageName(Stage stage);
Stage ParseStage(std::string_view name);

struct ExperimentConfig {
  std::filesystem::path data_dir = "data/ml-100k";
  std::filesystem::path out_dir = "out";
  // Dataset column of the trade-off CSV; defaults to the data directory name.
  std::string dataset_name;
  uint64_t seed = 1;
  double holdout = 0.2;
  TrainConfig recommender = DefaultRecommenderTrainConfig();
  AttackSetup attack;

  size_t k = 10;
  // Defaults to k - random_count.
  std::optional<size_t> keep_top;
  size_t random_count = 0;
  bool shuffle = false;
  size_t shuffle_window = 10;
  bool exclude_history = false;

  size_t runs = 5;
  std::vector<size_t> grid_k = {5, 10};
  UtilityMode utility = UtilityMode::kPlausibility;

  bool deterministic = false;
  size_t workers = 1;

  size_t KeepTop() const;
  std::string DatasetName() const;
  void Validate() const;
};

// Hash of every setting that the stage's artifacts depend on, including
// those of the stages it reads from.
uint64_t StageConfigHash(const ExperimentConfig& config, Stage stage);

// Stream seed of a stage, derived from the global seed.
uint64_t StageSeed(const ExperimentConfig& config, Stage stage);

struct ArtifactHeader {
  Stage stage = Stage::kIngest;
  uint64_t config_hash = 0;
  uint64_t seed = 0;
};

std::string FormatArtifactHeader(const ArtifactHeader& header);
// Reads the first line of an artifact; nullopt when it carries no header.
std::optional<ArtifactHeader> ReadArtifactHeader(const std::filesystem::path& path);

// Files a stage writes, relative to the output directory.
std::vector<std::string> StageArtifacts(Stage stage);

struct TrainReport {
  size_t held_out = 0;
  double hits_at_5 = 0.0;
  double hits_at_10 = 0.0;
};

// The train and tradeoff stages, returning what they wrote.
TrainReport RunTrainStage(const ExperimentConfig& config, std::ostream& log);
std::vector<TradeoffRow> RunTradeoffStage(const ExperimentConfig& config, std::ostream& log,
                                          const SweepListObserver& observer = {});

// Runs one stage, reading earlier artifacts from config.out_dir. Progress
// lines go to `log`.
void RunStage(Stage stage, const ExperimentConfig& config, std::ostream& log);

}  // namespace kgepb

#endif  // KGEPB_PIPELINE_H_
