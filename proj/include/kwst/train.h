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

#ifndef KWST_TRAIN_H_
#define KWST_TRAIN_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kwst/augment.h"
#include "kwst/checkpoint.h"
#include "kwst/dataset.h"
#include "kwst/model.h"

namespace kwst {

// The training recipes under comparison. The supervised modes train only the
// stage-1 model; the st modes run stage-2 student training on top of it,
// differing in whether spec masking is applied and on whose input:
//   kBaselineMp  supervised max-pool loss, classic augmentation
//   kMpSaug      supervised max-pool loss, classic + spec masking
//   kSt          student-teacher, classic augmentation only
//   kStSaug      student-teacher, spec masked input shared by both models
//   kStSaugNs    student-teacher, spec masking on the student input only
enum class TrainingMode { kBaselineMp, kMpSaug, kSt, kStSaug, kStSaugNs };

std::string mode_name(TrainingMode m);
TrainingMode mode_from_name(const std::string& name);
bool is_student_teacher(TrainingMode m);

struct TrainingConfig {
  TrainingMode mode = TrainingMode::kStSaug;
  int generations = 1;
  double alpha = 1.0;
  double lr = 0.05;
  // Learning rate for the student stages; 0 means "same as lr". Distillation
  // targets are dense, which tolerates a hotter rate than the max-pool loss.
  double student_lr = 0.0;
  int epochs = 10;
  // Epochs for the student stages; 0 means "same as epochs". The student
  // pool is several times larger, so it usually needs fewer passes.
  int student_epochs = 0;
  int batch_size = 16;
  std::uint64_t seed = 1;
  AugmentationPolicy augmentation;
  ArchConfig arch;
  double eval_target_fa_per_hour = 1.0;
  int eval_n_thresholds = 101;

  void validate() const;
  int effective_student_epochs() const { return student_epochs > 0 ? student_epochs : epochs; }
  double effective_student_lr() const { return student_lr > 0 ? student_lr : lr; }

  // The effective policy for a training stage. The mode is authoritative:
  // it fixes the routing and whether spec masking applies, while the knob
  // values (mask widths, SNR range, ...) come from `augmentation`.
  AugmentationPolicy resolved_policy(bool stage_two) const;

  // Hash of the resolved configuration, stored in checkpoints.
  std::string config_hash() const;
};

nlohmann::json training_config_to_json(const TrainingConfig& cfg);
TrainingConfig training_config_from_json(const nlohmann::json& j);

// Per-batch digests recorded for the routing contract: the un-spec-masked
// features, the teacher inputs and the student inputs, each combined over
// the batch in utterance order.
struct BatchTrace {
  int generation = 0;
  int epoch = 0;
  int batch_index = 0;
  std::uint64_t clean_digest = 0;
  std::uint64_t teacher_digest = 0;
  std::uint64_t student_digest = 0;
  double loss = 0.0;
};

using BatchObserver = std::function<void(const BatchTrace&)>;

struct EvalSummary {
  bool present = false;
  double target_fa_per_hour = 0.0;
  double fr_rate = 0.0;
  double threshold = 0.0;
  bool extrapolated = false;
};

struct GenerationReport {
  int generation = 0;
  double final_train_loss = 0.0;
  std::string checkpoint_path;
  std::string params_digest;
  EvalSummary eval;
};

nlohmann::json report_to_json(const GenerationReport& r);

// Stage 1: supervised training on labeled data with the max-pool loss and
// classic augmentation (plus spec masking for kMpSaug). Deterministic in
// (manifest, cfg). epochs == 0 returns the freshly initialized parameters.
ModelCheckpoint train_teacher(const DatasetManifest& labeled, const TrainingConfig& cfg,
                              const BatchObserver& observer = nullptr);

// Stage 2: the training pool is labeled + unlabeled with hard labels
// discarded. Per utterance the teacher scores its side of the augmented
// pair to produce soft labels and the student minimizes the distillation
// loss on its side. The student starts from a fresh seeded initialization;
// the returned checkpoint carries generation = teacher.generation + 1.
// `student_init` overrides the fresh initialization (test hook).
ModelCheckpoint train_student(const ModelCheckpoint& teacher, const DatasetManifest& labeled,
                              const DatasetManifest& unlabeled, const TrainingConfig& cfg,
                              const BatchObserver& observer = nullptr,
                              const ModelParams* student_init = nullptr);

// Full pipeline: teacher generation 0, then `generations` student stages for
// the student-teacher modes, each taking the previous stage's parameters as
// its teacher. When `run_dir` is non-empty, writes g<k>/checkpoint.kwst,
// g<k>/report.json and run_config.json. When `test_split` is given, each
// generation is evaluated at cfg.eval_target_fa_per_hour.
std::vector<GenerationReport> run_self_training(const DatasetManifest& labeled,
                                                const DatasetManifest& unlabeled,
                                                const TrainingConfig& cfg,
                                                const std::string& run_dir = "",
                                                const DatasetManifest* test_split = nullptr,
                                                const BatchObserver& observer = nullptr);

}  // namespace kwst

#endif  // KWST_TRAIN_H_
