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

// kgepb command-line harness.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgepb/error.h"
#include "kgepb/pipeline.h"

namespace {

using kgepb::Error;
using kgepb::ErrorCode;
using kgepb::ExperimentConfig;

struct Value {
  std::string text;
  std::string origin;  // "--flag" or "file:line"
};

using Setter = std::function<void(ExperimentConfig&, const Value&)>;

struct Key {
  std::string name;
  std::string help;
  bool is_switch = false;
  Setter set;
};

[[noreturn]] void BadValue(const Value& v, const std::string& expected) {
  throw Error(ErrorCode::kInvalidArgument,
              v.origin + ": invalid value '" + v.text + "', expected " + expected);
}

template <typename T>
T ParseNumber(const Value& v, const std::string& expected) {
  T out{};
  const char* begin = v.text.data();
  const char* end = begin + v.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end || v.text.empty()) BadValue(v, expected);
  return out;
}

size_t Count(const Value& v) { return ParseNumber<size_t>(v, "a non-negative integer"); }
uint64_t U64(const Value& v) { return ParseNumber<uint64_t>(v, "a non-negative integer"); }
double Real(const Value& v) { return ParseNumber<double>(v, "a number"); }

bool Switch(const Value& v) {
  if (v.text == "on" || v.text == "true" || v.text == "1" || v.text == "yes") return true;
  if (v.text == "off" || v.text == "false" || v.text == "0" || v.text == "no") return false;
  BadValue(v, "on or off");
}

kgepb::ModelKind Kind(const Value& v) {
  try {
    return kgepb::ParseModelKind(v.text);
  } catch (const Error&) {
    BadValue(v, "transe or rotate");
  }
}

std::vector<size_t> CountList(const Value& v) {
  std::vector<size_t> out;
  size_t start = 0;
  while (start <= v.text.size()) {
    const size_t comma = std::min(v.text.find(',', start), v.text.size());
    out.push_back(Count({v.text.substr(start, comma - start), v.origin}));
    start = comma + 1;
  }
  return out;
}

std::vector<Key> Keys() {
  using C = ExperimentConfig;
  std::vector<Key> keys = {
      {"data-dir", "dataset directory (MovieLens 100K or triples.tsv)", false,
       [](C& c, const Value& v) { c.data_dir = v.text; }},
      {"out", "output directory (default $KGEPB_OUT or ./out)", false,
       [](C& c, const Value& v) { c.out_dir = v.text; }},
      {"dataset-name", "dataset column of the trade-off CSV", false,
       [](C& c, const Value& v) { c.dataset_name = v.text; }},
      {"seed", "global seed", false, [](C& c, const Value& v) { c.seed = U64(v); }},
      {"holdout", "per-user held-out interaction fraction", false,
       [](C& c, const Value& v) { c.holdout = Real(v); }},
      {"model", "recommender model: transe or rotate", false,
       [](C& c, const Value& v) { c.recommender.kind = Kind(v); }},
      {"dim", "recommender embedding dimension", false,
       [](C& c, const Value& v) { c.recommender.dim = Count(v); }},
      {"epochs", "recommender epochs", false,
       [](C& c, const Value& v) { c.recommender.epochs = Count(v); }},
      {"batch", "recommender batch size", false,
       [](C& c, const Value& v) { c.recommender.batch_size = Count(v); }},
      {"lr", "recommender learning rate", false,
       [](C& c, const Value& v) { c.recommender.learning_rate = Real(v); }},
      {"negatives", "recommender negatives per positive", false,
       [](C& c, const Value& v) { c.recommender.negatives = Count(v); }},
      {"gamma", "recommender margin", false,
       [](C& c, const Value& v) { c.recommender.margin = Real(v); }},
      {"alpha", "recommender adversarial temperature", false,
       [](C& c, const Value& v) { c.recommender.adversarial_temperature = Real(v); }},
      {"k", "recommendation list length", false,
       [](C& c, const Value& v) { c.k = Count(v); }},
      {"keep-top", "t: top items kept (default k - random-count)", false,
       [](C& c, const Value& v) { c.keep_top = Count(v); }},
      {"random-count", "r: random items added", false,
       [](C& c, const Value& v) { c.random_count = Count(v); }},
      {"shuffle", "shuffle the top window before keeping", true,
       [](C& c, const Value& v) { c.shuffle = Switch(v); }},
      {"shuffle-window", "W: top items eligible for keeping", false,
       [](C& c, const Value& v) { c.shuffle_window = Count(v); }},
      {"exclude-history", "never draw random items from the user's history", true,
       [](C& c, const Value& v) { c.exclude_history = Switch(v); }},
      {"runs", "repetitions per trade-off point", false,
       [](C& c, const Value& v) { c.runs = Count(v); }},
      {"grid-k", "list lengths of the trade-off grid, e.g. 5,10", false,
       [](C& c, const Value& v) { c.grid_k = CountList(v); }},
      {"utility", "utility scores: plausibility or raw", false,
       [](C& c, const Value& v) {
         if (v.text == "plausibility") {
           c.utility = kgepb::UtilityMode::kPlausibility;
         } else if (v.text == "raw") {
           c.utility = kgepb::UtilityMode::kRawScore;
         } else {
           BadValue(v, "plausibility or raw");
         }
       }},
      {"target-fraction", "fraction of users whose attribute is hidden", false,
       [](C& c, const Value& v) { c.attack.target_fraction = Real(v); }},
      {"aux-genres", "give the attacker item genres: on or off", false,
       [](C& c, const Value& v) { c.attack.aux_genres = Switch(v); }},
      {"sensitive", "sensitive relation label", false,
       [](C& c, const Value& v) { c.attack.sensitive_relation = v.text; }},
      {"attack-model", "attack model: transe or rotate", false,
       [](C& c, const Value& v) { c.attack.train.kind = Kind(v); }},
      {"attack-dim", "attack embedding dimension", false,
       [](C& c, const Value& v) { c.attack.train.dim = Count(v); }},
      {"attack-epochs", "attack epochs", false,
       [](C& c, const Value& v) { c.attack.train.epochs = Count(v); }},
      {"attack-batch", "attack batch size", false,
       [](C& c, const Value& v) { c.attack.train.batch_size = Count(v); }},
      {"attack-lr", "attack learning rate", false,
       [](C& c, const Value& v) { c.attack.train.learning_rate = Real(v); }},
      {"attack-negatives", "attack negatives per positive", false,
       [](C& c, const Value& v) { c.attack.train.negatives = Count(v); }},
      {"attack-gamma", "attack margin", false,
       [](C& c, const Value& v) { c.attack.train.margin = Real(v); }},
      {"attack-alpha", "attack adversarial temperature", false,
       [](C& c, const Value& v) { c.attack.train.adversarial_temperature = Real(v); }},
      {"deterministic", "single worker everywhere", true,
       [](C& c, const Value& v) { c.deterministic = Switch(v); }},
      {"workers", "worker threads for training and sweeps", false,
       [](C& c, const Value& v) { c.workers = Count(v); }},
  };
  return keys;
}

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat key=value file; blank lines and lines starting with '#' are skipped.
std::map<std::string, Value> ReadConfigFile(const std::string& path,
                                            const std::map<std::string, Key>& keys) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file " + path);
  std::map<std::string, Value> values;
  std::string line;
  for (size_t line_no = 1; std::getline(in, line); ++line_no) {
    const std::string where = path + ":" + std::to_string(line_no);
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParse, where + ": expected key=value");
    }
    std::string key = Trim(line.substr(0, eq));
    if (key.starts_with("--")) key = key.substr(2);
    if (!keys.contains(key)) {
      throw Error(ErrorCode::kParse, where + ": unknown key '" + key + "'");
    }
    values[key] = {Trim(line.substr(eq + 1)), where + ": " + key};
  }
  return values;
}

int Run(int argc, char** argv) {
  CLI::App app{"Knowledge-graph recommender privacy workbench", "kgepb"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "show help for all subcommands");

  std::string config_path;
  app.add_option("--config", config_path, "flat key=value configuration file")
      ->check(CLI::ExistingFile);

  std::map<std::string, Key> keys;
  std::map<std::string, std::string> flag_text;
  for (Key& key : Keys()) {
    const std::string flag = "--" + key.name;
    std::string& target = flag_text[key.name];
    if (key.is_switch) {
      app.add_flag(flag + "{on}", target, key.help);
    } else {
      app.add_option(flag, target, key.help);
    }
    keys.emplace(key.name, std::move(key));
  }

  struct StageCommand {
    kgepb::Stage stage;
    const char* help;
  };
  const StageCommand commands[] = {
      {kgepb::Stage::kIngest, "build graph.tsv from the dataset"},
      {kgepb::Stage::kTrain, "split interactions and train the recommender"},
      {kgepb::Stage::kRecommend, "write top-K lists for every user"},
      {kgepb::Stage::kSanitize, "sanitize the top-K lists"},
      {kgepb::Stage::kAttack, "run the attribute-inference attack on sanitized lists"},
      {kgepb::Stage::kTradeoff, "sweep the sanitization grid and write tradeoff.csv"},
      {kgepb::Stage::kExport, "export triples and embeddings"},
  };
  for (const StageCommand& c : commands) {
    app.add_subcommand(std::string(kgepb::StageName(c.stage)), c.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "kgepb: error: " << e.what() << '\n';
    return 2;
  }

  std::map<std::string, Value> values;
  if (!config_path.empty()) values = ReadConfigFile(config_path, keys);
  for (const auto& [name, text] : flag_text) {
    if (app.count("--" + name) > 0) values[name] = {text, "--" + name};
  }
  if (!values.contains("out")) {
    if (const char* env = std::getenv("KGEPB_OUT"); env != nullptr && *env != '\0') {
      values["out"] = {env, "KGEPB_OUT"};
    }
  }

  ExperimentConfig config;
  for (const auto& [name, value] : values) keys.at(name).set(config, value);

  const CLI::App* sub = app.get_subcommands().front();
  kgepb::RunStage(kgepb::ParseStage(sub->get_name()), config, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "kgepb: error: " << e.what() << '\n';
    return 1;
  }
}
