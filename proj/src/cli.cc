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

#include "kwst/cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "kwst/augment.h"
#include "kwst/error.h"
#include "kwst/eval.h"
#include "kwst/rng.h"

namespace kwst {

namespace fs = std::filesystem;
using nlohmann::json;

json run_config_to_json(const RunConfig& cfg) {
  json j = training_config_to_json(cfg.training);
  j["manifest"] = cfg.manifest_path;
  j["out_dir"] = cfg.out_dir;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  json training = json::object();
  for (const auto& [key, value] : j.items()) {
    if (key == "manifest") cfg.manifest_path = value.get<std::string>();
    else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
    else training[key] = value;  // unknown keys rejected by the training parser
  }
  cfg.training = training_config_from_json(training);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("config parse error in " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

RunConfig resolve_run_config(const TrainCliOptions& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) cfg = load_run_config(opts.config_path);

  if (!opts.manifest_path.empty()) cfg.manifest_path = opts.manifest_path;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.mode) cfg.training.mode = mode_from_name(*opts.mode);
  if (opts.generations) cfg.training.generations = *opts.generations;
  if (opts.alpha) cfg.training.alpha = *opts.alpha;
  if (opts.lr) cfg.training.lr = *opts.lr;
  if (opts.epochs) cfg.training.epochs = *opts.epochs;
  if (opts.batch_size) cfg.training.batch_size = *opts.batch_size;
  if (opts.seed) cfg.training.seed = *opts.seed;
  if (opts.target_fa) cfg.training.eval_target_fa_per_hour = *opts.target_fa;

  if (cfg.manifest_path.empty()) throw ValidationError("no manifest path given");
  if (cfg.out_dir.empty()) throw ValidationError("no output directory given");
  cfg.training.validate();
  return cfg;
}

namespace {

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("short write on " + path);
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ",";
      out << m(r, c);
    }
    out << "\n";
  }
  if (!out) throw IoError("short write on " + path);
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_gen_data(const GenDataOptions& opts) {
  return guarded([&] {
    if (opts.out_dir.empty()) throw ValidationError("gen-data: no output directory given");
    const DatasetManifest manifest = generate_synthetic_corpus(opts.corpus, opts.out_dir);
    std::cout << "wrote " << manifest.records.size() << " utterances ("
              << manifest.count(Split::kTrainLabeled) << " labeled, "
              << manifest.count(Split::kTrainUnlabeled) << " unlabeled, "
              << manifest.count(Split::kTest) << " test) under " << opts.out_dir << "\n";
  });
}

namespace {

// Shared by train-teacher and selftrain: resolve config, load manifests,
// run, persist the full run config for reproduction.
void run_training(const TrainCliOptions& opts, bool teacher_only) {
  RunConfig cfg = resolve_run_config(opts);
  if (teacher_only && is_student_teacher(cfg.training.mode))
    throw ValidationError("train-teacher expects a supervised mode (baseline_mp or mp_saug)");

  const DatasetManifest manifest = load_manifest(cfg.manifest_path);
  const DatasetManifest labeled = manifest.subset(Split::kTrainLabeled);
  const DatasetManifest unlabeled = manifest.subset(Split::kTrainUnlabeled);
  const DatasetManifest test = manifest.subset(Split::kTest);

  const auto reports = run_self_training(labeled, unlabeled, cfg.training, cfg.out_dir,
                                         test.records.empty() ? nullptr : &test);
  write_json_file(run_config_to_json(cfg), (fs::path(cfg.out_dir) / "run_config.json").string());

  for (const auto& r : reports) {
    std::cout << "g" << r.generation << ": final_train_loss=" << r.final_train_loss;
    if (r.eval.present) {
      std::cout << " fr_at_" << r.eval.target_fa_per_hour << "fa/h=" << r.eval.fr_rate * 100.0
                << "%";
      if (r.eval.extrapolated) std::cout << " (extrapolated)";
    }
    std::cout << "\n";
  }
}

}  // namespace

int cmd_train_teacher(const TrainCliOptions& opts) {
  return guarded([&] { run_training(opts, /*teacher_only=*/true); });
}

int cmd_selftrain(const TrainCliOptions& opts) {
  return guarded([&] { run_training(opts, /*teacher_only=*/false); });
}

int cmd_evaluate(const EvaluateOptions& opts) {
  return guarded([&] {
    const ModelCheckpoint ckpt = load_checkpoint(opts.checkpoint_path);
    const DatasetManifest manifest = load_manifest(opts.manifest_path);
    const DatasetManifest split = manifest.subset(split_from_name(opts.split));
    const MeasureResult res = measure(split, ckpt.params, ckpt.arch, opts.threshold);

    const json report{{"threshold", opts.threshold},
                      {"fa_per_hour", res.fa_per_hour},
                      {"fr_rate", res.fr_rate},
                      {"false_accepts", res.false_accepts},
                      {"missed_positives", res.missed_positives},
                      {"n_positives", res.n_positives},
                      {"n_negatives", res.n_negatives},
                      {"negative_hours", res.negative_hours}};
    if (!opts.out_path.empty()) write_json_file(report, opts.out_path);
    std::cout << "threshold=" << opts.threshold << " fa_per_hour=" << res.fa_per_hour
              << " fr_rate=" << res.fr_rate * 100.0 << "%\n";
  });
}

int cmd_roc(const RocOptions& opts) {
  return guarded([&] {
    const ModelCheckpoint ckpt = load_checkpoint(opts.checkpoint_path);
    const DatasetManifest manifest = load_manifest(opts.manifest_path);
    const DatasetManifest split = manifest.subset(split_from_name(opts.split));

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + opts.out_dir);

    const RocCurve curve = sweep_roc(split, ckpt.params, ckpt.arch, opts.n_thresholds);
    const OperatingPoint op = fr_at_fa(curve, opts.target_fa);

    write_roc_csv(curve, (fs::path(opts.out_dir) / "roc.csv").string());
    if (opts.svg) write_roc_svg(curve, (fs::path(opts.out_dir) / "roc.svg").string());
    const json report{{"target_fa_per_hour", opts.target_fa},
                      {"fr_rate", op.fr_rate},
                      {"threshold", op.threshold},
                      {"extrapolated", op.extrapolated},
                      {"n_thresholds", opts.n_thresholds}};
    write_json_file(report, (fs::path(opts.out_dir) / "roc_report.json").string());

    std::cout << "FR at " << opts.target_fa << " FA/h: " << op.fr_rate * 100.0 << "%"
              << (op.extrapolated ? " (extrapolated)" : "") << " (threshold " << op.threshold
              << ")\n";
  });
}

int cmd_augment_preview(const PreviewOptions& opts) {
  return guarded([&] {
    const DatasetManifest manifest = load_manifest(opts.manifest_path);
    const UtteranceRecord* rec = nullptr;
    for (const auto& r : manifest.records)
      if (r.id == opts.utterance_id) rec = &r;
    if (!rec) throw ValidationError("utterance not found in manifest: " + opts.utterance_id);

    AugmentationPolicy policy;
    if (!opts.policy_json.empty()) policy = policy_from_json(json::parse(opts.policy_json));

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + opts.out_dir);

    const AudioClip clip = read_wav(manifest.resolve_path(*rec));
    const Spectrogram before = extract_features(clip);
    const AugmentedPair pair = make_pair(
        before, policy, derive_key(opts.seed, "saug:" + rec->id, 0), rec->id);

    write_matrix_csv(before.frames, (fs::path(opts.out_dir) / "before.csv").string());
    write_matrix_csv(pair.teacher_input.frames,
                     (fs::path(opts.out_dir) / "teacher_input.csv").string());
    write_matrix_csv(pair.student_input.frames,
                     (fs::path(opts.out_dir) / "student_input.csv").string());
    std::cout << "wrote before/teacher/student spectrogram CSVs for " << rec->id << " under "
              << opts.out_dir << "\n";
  });
}

}  // namespace kwst
