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

#include "kwst/train.h"

#include <filesystem>
#include <fstream>
#include <numeric>

#include "kwst/error.h"
#include "kwst/eval.h"
#include "kwst/losses.h"
#include "kwst/rng.h"
#include "kwst/threading.h"

namespace kwst {

namespace fs = std::filesystem;
using nlohmann::json;

std::string mode_name(TrainingMode m) {
  switch (m) {
    case TrainingMode::kBaselineMp: return "baseline_mp";
    case TrainingMode::kMpSaug: return "mp_saug";
    case TrainingMode::kSt: return "st";
    case TrainingMode::kStSaug: return "st_saug";
    case TrainingMode::kStSaugNs: return "st_saug_ns";
  }
  throw ValidationError("unknown training mode");
}

TrainingMode mode_from_name(const std::string& name) {
  if (name == "baseline_mp") return TrainingMode::kBaselineMp;
  if (name == "mp_saug") return TrainingMode::kMpSaug;
  if (name == "st") return TrainingMode::kSt;
  if (name == "st_saug") return TrainingMode::kStSaug;
  if (name == "st_saug_ns") return TrainingMode::kStSaugNs;
  throw ValidationError("unknown training mode: " + name);
}

bool is_student_teacher(TrainingMode m) {
  return m == TrainingMode::kSt || m == TrainingMode::kStSaug || m == TrainingMode::kStSaugNs;
}

void TrainingConfig::validate() const {
  if (generations < 1) throw ValidationError("config: generations must be >= 1");
  if (alpha < 0.0) throw ValidationError("config: alpha must be >= 0");
  if (lr < 0.0) throw ValidationError("config: lr must be >= 0");
  if (epochs < 0) throw ValidationError("config: epochs must be >= 0");
  if (student_epochs < 0) throw ValidationError("config: student_epochs must be >= 0");
  if (student_lr < 0) throw ValidationError("config: student_lr must be >= 0");
  if (batch_size < 1) throw ValidationError("config: batch_size must be >= 1");
  if (eval_n_thresholds < 2) throw ValidationError("config: eval_n_thresholds must be >= 2");
  augmentation.validate();
  arch.validate();
}

AugmentationPolicy TrainingConfig::resolved_policy(bool stage_two) const {
  AugmentationPolicy p = augmentation;
  switch (mode) {
    case TrainingMode::kBaselineMp:
      p.spec_enabled = false;
      p.routing = Routing::kNone;
      break;
    case TrainingMode::kMpSaug:
      p.spec_enabled = true;
      p.routing = Routing::kNone;
      break;
    case TrainingMode::kSt:
      p.spec_enabled = false;
      p.routing = Routing::kNone;
      break;
    case TrainingMode::kStSaug:
      p.spec_enabled = stage_two;
      p.routing = Routing::kShared;
      break;
    case TrainingMode::kStSaugNs:
      p.spec_enabled = stage_two;
      p.routing = Routing::kStudentOnly;
      break;
  }
  return p;
}

json training_config_to_json(const TrainingConfig& cfg) {
  return json{{"mode", mode_name(cfg.mode)},
              {"generations", cfg.generations},
              {"alpha", cfg.alpha},
              {"lr", cfg.lr},
              {"epochs", cfg.epochs},
              {"student_epochs", cfg.student_epochs},
              {"student_lr", cfg.student_lr},
              {"batch_size", cfg.batch_size},
              {"seed", cfg.seed},
              {"augmentation", policy_to_json(cfg.augmentation)},
              {"arch", arch_to_json(cfg.arch)},
              {"eval_target_fa_per_hour", cfg.eval_target_fa_per_hour},
              {"eval_n_thresholds", cfg.eval_n_thresholds}};
}

TrainingConfig training_config_from_json(const json& j) {
  TrainingConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "mode") cfg.mode = mode_from_name(value.get<std::string>());
    else if (key == "generations") cfg.generations = value.get<int>();
    else if (key == "alpha") cfg.alpha = value.get<double>();
    else if (key == "lr") cfg.lr = value.get<double>();
    else if (key == "epochs") cfg.epochs = value.get<int>();
    else if (key == "student_epochs") cfg.student_epochs = value.get<int>();
    else if (key == "student_lr") cfg.student_lr = value.get<double>();
    else if (key == "batch_size") cfg.batch_size = value.get<int>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "augmentation") cfg.augmentation = policy_from_json(value);
    else if (key == "arch") cfg.arch = arch_from_json(value);
    else if (key == "eval_target_fa_per_hour") cfg.eval_target_fa_per_hour = value.get<double>();
    else if (key == "eval_n_thresholds") cfg.eval_n_thresholds = value.get<int>();
    else throw ValidationError("unknown config key: " + key);
  }
  cfg.validate();
  return cfg;
}

std::string TrainingConfig::config_hash() const {
  const std::string text = training_config_to_json(*this).dump();
  return to_hex(digest_bytes(text.data(), text.size()));
}

json report_to_json(const GenerationReport& r) {
  json eval{{"present", r.eval.present}};
  if (r.eval.present) {
    eval["target_fa_per_hour"] = r.eval.target_fa_per_hour;
    eval["fr_rate"] = r.eval.fr_rate;
    eval["threshold"] = r.eval.threshold;
    eval["extrapolated"] = r.eval.extrapolated;
  }
  return json{{"generation", r.generation},
              {"final_train_loss", r.final_train_loss},
              {"checkpoint_path", r.checkpoint_path},
              {"params_digest", r.params_digest},
              {"eval", eval}};
}

namespace {

// Per-utterance training result, combined across the batch in index order.
struct ExampleResult {
  ModelParams grads;
  double loss = 0.0;
  std::uint64_t clean_digest = 0;
  std::uint64_t teacher_digest = 0;
  std::uint64_t student_digest = 0;
};

AudioClip synth_noise(std::size_t num_samples, std::uint64_t key) {
  RngStream rng(key);
  AudioClip noise;
  noise.samples.resize(num_samples);
  for (double& s : noise.samples) s = 0.1 * rng.normal();
  return noise;
}

// Loads and classic-augments one utterance, then extracts features. The
// classic stage is drawn once per (seed, utterance, epoch), so teacher and
// student always share it.
Spectrogram prepare_features(const std::string& wav_path, const std::string& utt_id, int epoch,
                             const AugmentationPolicy& policy, std::uint64_t seed) {
  AudioClip clip = read_wav(wav_path);
  if (policy.classic_enabled) {
    const AudioClip noise =
        synth_noise(clip.samples.size(), derive_key(seed, "noise:" + utt_id, epoch));
    clip = classic_augment(clip, noise, policy, derive_key(seed, "classic:" + utt_id, epoch));
  }
  return extract_features(clip);
}

using ExampleFn = std::function<ExampleResult(int record_index, int epoch)>;

// Shared epoch/batch driver: seeded shuffle, parallel per-utterance work,
// ordered gradient reduction, one SGD step per batch. Returns the mean batch
// loss of the final epoch (0 when epochs == 0).
double run_epochs(int n_records, int epochs, double lr, const TrainingConfig& cfg,
                  int generation, ModelParams& params, const ExampleFn& example_fn,
                  const BatchObserver& observer) {
  double final_epoch_loss = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::vector<int> order(n_records);
    std::iota(order.begin(), order.end(), 0);
    RngStream shuffle_rng(derive_key(cfg.seed, "shuffle", generation, epoch));
    for (int i = n_records - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.uniform_int(0, i)]);

    double loss_sum = 0.0;
    int batch_count = 0;
    for (int start = 0; start < n_records; start += cfg.batch_size) {
      const int batch_n = std::min(cfg.batch_size, n_records - start);
      std::vector<ExampleResult> results(batch_n);
      parallel_for_indexed(batch_n,
                           [&](int i) { results[i] = example_fn(order[start + i], epoch); });

      ModelParams total = make_params(cfg.arch);
      double batch_loss = 0.0;
      Fnv1a clean_h, teacher_h, student_h;
      for (const ExampleResult& r : results) {
        accumulate(total, r.grads);
        batch_loss += r.loss;
        clean_h.update_u64(r.clean_digest);
        teacher_h.update_u64(r.teacher_digest);
        student_h.update_u64(r.student_digest);
      }
      scale_params(total, 1.0 / batch_n);
      batch_loss /= batch_n;
      sgd_step(params, total, lr);

      if (observer) {
        observer(BatchTrace{generation, epoch, batch_count, clean_h.digest(), teacher_h.digest(),
                            student_h.digest(), batch_loss});
      }
      loss_sum += batch_loss;
      ++batch_count;
    }
    if (batch_count > 0) final_epoch_loss = loss_sum / batch_count;
  }
  return final_epoch_loss;
}

double teacher_stage(const DatasetManifest& labeled, const TrainingConfig& cfg,
                     ModelParams& params, const BatchObserver& observer) {
  const AugmentationPolicy policy = cfg.resolved_policy(/*stage_two=*/false);
  const auto& records = labeled.records;

  ExampleFn fn = [&](int index, int epoch) {
    const UtteranceRecord& rec = records[index];
    Spectrogram spec = prepare_features(labeled.resolve_path(rec), rec.id, epoch, policy,
                                        cfg.seed);
    ExampleResult out;
    out.clean_digest = spec.frames.content_digest();
    if (policy.spec_enabled)
      spec = spec_augment(spec, policy, derive_key(cfg.seed, "saug:" + rec.id, epoch));
    const std::uint64_t input_digest = spec.frames.content_digest();
    out.teacher_digest = input_digest;
    out.student_digest = input_digest;

    HardLabelSequence label;
    label.positive = rec.label == Label::kPositive;
    if (label.positive) label.keyword_span = *rec.keyword_span;
    label.encoder_units = *rec.encoder_units;

    ForwardTrace trace;
    const ModelOutput model_out = forward(spec, params, cfg.arch, &trace);
    out.loss = maxpool_supervised_loss(model_out, label, cfg.alpha).total;
    Matrix d_dec, d_enc;
    maxpool_supervised_loss_grads(model_out, label, cfg.alpha, &d_dec, &d_enc);
    out.grads = backward(params, cfg.arch, trace, d_enc, d_dec);
    return out;
  };

  return run_epochs(static_cast<int>(records.size()), cfg.epochs, cfg.lr, cfg,
                    /*generation=*/0, params, fn, observer);
}

struct PoolEntry {
  std::string id;
  std::string path;  // resolved
};

double student_stage(const ModelParams& teacher_params, const std::vector<PoolEntry>& pool,
                     const TrainingConfig& cfg, int generation, ModelParams& params,
                     const BatchObserver& observer) {
  const AugmentationPolicy policy = cfg.resolved_policy(/*stage_two=*/true);

  ExampleFn fn = [&](int index, int epoch) {
    const PoolEntry& entry = pool[index];
    const Spectrogram spec = prepare_features(entry.path, entry.id, epoch, policy, cfg.seed);

    const std::string draw_id = mode_name(cfg.mode) + ":" + entry.id + ":" +
                                std::to_string(epoch);
    const AugmentedPair pair = make_pair(
        spec, policy, derive_key(cfg.seed, "saug:" + entry.id, epoch, generation), draw_id);

    ExampleResult out;
    out.clean_digest = spec.frames.content_digest();
    out.teacher_digest = pair.teacher_input.frames.content_digest();
    out.student_digest = pair.student_input.frames.content_digest();

    const ModelOutput teacher_out = forward(pair.teacher_input, teacher_params, cfg.arch);
    ForwardTrace trace;
    const ModelOutput student_out = forward(pair.student_input, params, cfg.arch, &trace);
    out.loss = student_teacher_loss(teacher_out, student_out, cfg.alpha).total;
    Matrix d_dec, d_enc;
    student_teacher_loss_grads(teacher_out, student_out, cfg.alpha, &d_dec, &d_enc);
    out.grads = backward(params, cfg.arch, trace, d_enc, d_dec);
    return out;
  };

  return run_epochs(static_cast<int>(pool.size()), cfg.effective_student_epochs(),
                    cfg.effective_student_lr(), cfg, generation, params, fn, observer);
}

}  // namespace

ModelCheckpoint train_teacher(const DatasetManifest& labeled, const TrainingConfig& cfg,
                              const BatchObserver& observer) {
  cfg.validate();
  if (labeled.records.empty()) throw ValidationError("teacher training: no labeled records");
  for (const auto& rec : labeled.records)
    if (!rec.labeled())
      throw ValidationError("teacher training: unlabeled record in labeled set: " + rec.id);

  ModelParams params = init_params(cfg.arch, cfg.seed);
  teacher_stage(labeled, cfg, params, observer);
  return ModelCheckpoint{kCheckpointVersion, 0, cfg.arch, std::move(params), cfg.config_hash()};
}

ModelCheckpoint train_student(const ModelCheckpoint& teacher, const DatasetManifest& labeled,
                              const DatasetManifest& unlabeled, const TrainingConfig& cfg,
                              const BatchObserver& observer, const ModelParams* student_init) {
  cfg.validate();
  if (!(teacher.arch == cfg.arch))
    throw ValidationError("student training: teacher checkpoint arch does not match config");
  if (labeled.records.empty() && unlabeled.records.empty())
    throw ValidationError("student training: empty training pool");

  // Hard labels are discarded here: the pool is ids and audio paths only.
  std::vector<PoolEntry> pool;
  pool.reserve(labeled.records.size() + unlabeled.records.size());
  for (const auto& rec : labeled.records) pool.push_back({rec.id, labeled.resolve_path(rec)});
  for (const auto& rec : unlabeled.records) pool.push_back({rec.id, unlabeled.resolve_path(rec)});

  const int generation = teacher.generation + 1;
  ModelParams params = student_init
                           ? *student_init
                           : init_params(cfg.arch, derive_key(cfg.seed, "student-init",
                                                              static_cast<std::uint64_t>(generation)));
  student_stage(teacher.params, pool, cfg, generation, params, observer);
  return ModelCheckpoint{kCheckpointVersion, generation, cfg.arch, std::move(params),
                         cfg.config_hash()};
}

namespace {

EvalSummary evaluate_generation(const ModelCheckpoint& ckpt, const DatasetManifest& test_split,
                                const TrainingConfig& cfg) {
  EvalSummary summary;
  const RocCurve curve =
      sweep_roc(test_split, ckpt.params, ckpt.arch, cfg.eval_n_thresholds);
  const OperatingPoint op = fr_at_fa(curve, cfg.eval_target_fa_per_hour);
  summary.present = true;
  summary.target_fa_per_hour = cfg.eval_target_fa_per_hour;
  summary.fr_rate = op.fr_rate;
  summary.threshold = op.threshold;
  summary.extrapolated = op.extrapolated;
  return summary;
}

GenerationReport persist_generation(const ModelCheckpoint& ckpt, double final_loss,
                                    const std::string& run_dir, const DatasetManifest* test_split,
                                    const TrainingConfig& cfg) {
  GenerationReport report;
  report.generation = ckpt.generation;
  report.final_train_loss = final_loss;
  report.params_digest = to_hex(ckpt.params.digest());
  if (test_split) report.eval = evaluate_generation(ckpt, *test_split, cfg);

  if (!run_dir.empty()) {
    const std::string rel = "g" + std::to_string(ckpt.generation);
    const fs::path gen_dir = fs::path(run_dir) / rel;
    std::error_code ec;
    fs::create_directories(gen_dir, ec);
    if (ec) throw IoError("cannot create run directory: " + gen_dir.string());
    report.checkpoint_path = rel + "/checkpoint.kwst";
    save_checkpoint(ckpt, (gen_dir / "checkpoint.kwst").string());
    std::ofstream rf(gen_dir / "report.json", std::ios::trunc);
    if (!rf) throw IoError("cannot write report: " + (gen_dir / "report.json").string());
    rf << report_to_json(report).dump(2) << "\n";
  }
  return report;
}

// Tracks the mean batch loss of the most recent epoch seen per generation.
class LossTracker {
 public:
  explicit LossTracker(const BatchObserver& inner) : inner_(inner) {}

  BatchObserver observer() {
    return [this](const BatchTrace& t) {
      if (t.epoch != epoch_ || t.generation != generation_) {
        epoch_ = t.epoch;
        generation_ = t.generation;
        sum_ = 0.0;
        count_ = 0;
      }
      sum_ += t.loss;
      ++count_;
      if (inner_) inner_(t);
    };
  }

  double final_epoch_loss() const { return count_ ? sum_ / count_ : 0.0; }

 private:
  BatchObserver inner_;
  int epoch_ = -1;
  int generation_ = -1;
  double sum_ = 0.0;
  int count_ = 0;
};

}  // namespace

std::vector<GenerationReport> run_self_training(const DatasetManifest& labeled,
                                                const DatasetManifest& unlabeled,
                                                const TrainingConfig& cfg,
                                                const std::string& run_dir,
                                                const DatasetManifest* test_split,
                                                const BatchObserver& observer) {
  cfg.validate();
  if (!run_dir.empty()) {
    std::error_code ec;
    fs::create_directories(run_dir, ec);
    if (ec) throw IoError("cannot create run directory: " + run_dir);
    std::ofstream cf(fs::path(run_dir) / "run_config.json", std::ios::trunc);
    if (!cf) throw IoError("cannot write run config");
    cf << training_config_to_json(cfg).dump(2) << "\n";
  }

  std::vector<GenerationReport> reports;

  LossTracker teacher_losses(observer);
  ModelCheckpoint teacher = train_teacher(labeled, cfg, teacher_losses.observer());
  reports.push_back(persist_generation(teacher, teacher_losses.final_epoch_loss(), run_dir,
                                       test_split, cfg));

  if (is_student_teacher(cfg.mode)) {
    for (int k = 1; k <= cfg.generations; ++k) {
      LossTracker student_losses(observer);
      ModelCheckpoint student =
          train_student(teacher, labeled, unlabeled, cfg, student_losses.observer());
      reports.push_back(persist_generation(student, student_losses.final_epoch_loss(), run_dir,
                                           test_split, cfg));
      teacher = std::move(student);  // the student becomes the next teacher
    }
  }
  return reports;
}

}  // namespace kwst
