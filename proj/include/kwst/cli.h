/* Copyright 2026 The KWST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef KWST_CLI_H_
#define KWST_CLI_H_

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "kwst/dataset.h"
#include "kwst/train.h"

namespace kwst {

// Full run configuration: training settings plus dataset and output paths.
// Serialized back into the run directory so a run can be reproduced from its
// own artifacts.
struct RunConfig {
  TrainingConfig training;
  std::string manifest_path;
  std::string out_dir;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);  // unknown keys rejected
RunConfig load_run_config(const std::string& path);

struct GenDataOptions {
  std::string out_dir;
  CorpusSpec corpus;
};

struct TrainCliOptions {
  std::string config_path;    // optional JSON config file
  std::string manifest_path;  // overrides the config file
  std::string out_dir;        // overrides the config file
  std::optional<std::string> mode;
  std::optional<int> generations;
  std::optional<double> alpha;
  std::optional<double> lr;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<std::uint64_t> seed;
  std::optional<double> target_fa;
};

struct EvaluateOptions {
  std::string checkpoint_path;
  std::string manifest_path;
  std::string split = "test";
  double threshold = 0.5;
  std::string out_path;  // JSON report; optional
};

struct RocOptions {
  std::string checkpoint_path;
  std::string manifest_path;
  std::string split = "test";
  std::string out_dir;
  int n_thresholds = 101;
  double target_fa = 1.0;
  bool svg = false;
};

struct PreviewOptions {
  std::string manifest_path;
  std::string utterance_id;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::string policy_json;  // inline JSON overriding the default policy
};

// Resolves config file + flag overrides into a validated RunConfig.
RunConfig resolve_run_config(const TrainCliOptions& opts);

int cmd_gen_data(const GenDataOptions& opts);
int cmd_train_teacher(const TrainCliOptions& opts);
int cmd_selftrain(const TrainCliOptions& opts);
int cmd_evaluate(const EvaluateOptions& opts);
int cmd_roc(const RocOptions& opts);
int cmd_augment_preview(const PreviewOptions& opts);

}  // namespace kwst

#endif  // KWST_CLI_H_
