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

#include <CLI11.hpp>

#include "kwst/cli.h"

int main(int argc, char** argv) {
  CLI::App app{"kwst: noisy student-teacher self-training for streaming keyword spotting"};
  app.require_subcommand(1);

  // gen-data
  kwst::GenDataOptions gen;
  double test_snr_low = 0.0, test_snr_high = 0.0;
  bool has_test_snr = false;
  auto* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic keyword corpus");
  gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();
  gen_cmd->add_option("--seed", gen.corpus.seed, "corpus seed");
  gen_cmd->add_option("--labeled-pos", gen.corpus.n_labeled_pos, "labeled positive count");
  gen_cmd->add_option("--labeled-neg", gen.corpus.n_labeled_neg, "labeled negative count");
  gen_cmd->add_option("--unlabeled", gen.corpus.n_unlabeled, "unlabeled count");
  gen_cmd->add_option("--test", gen.corpus.n_test, "test utterance count");
  gen_cmd->add_option("--snr-low", gen.corpus.snr_db_low, "train SNR range low (dB)");
  gen_cmd->add_option("--snr-high", gen.corpus.snr_db_high, "train SNR range high (dB)");
  auto* tsl = gen_cmd->add_option("--test-snr-low", test_snr_low, "test SNR range low (dB)");
  auto* tsh = gen_cmd->add_option("--test-snr-high", test_snr_high, "test SNR range high (dB)");
  tsl->needs(tsh);
  tsh->needs(tsl);
  gen_cmd->add_option("--unlabeled-pos-ratio", gen.corpus.unlabeled_pos_ratio,
                      "positive fraction of the unlabeled pool");
  gen_cmd->add_option("--clip-seconds", gen.corpus.clip_seconds, "utterance length in seconds");
  gen_cmd->add_flag("--emit-components", gen.corpus.emit_components,
                    "also write clean/noise component WAVs");
  gen_cmd->callback([&] {
    has_test_snr = tsl->count() > 0;
    if (has_test_snr) gen.corpus.test_snr_db = std::make_pair(test_snr_low, test_snr_high);
    std::exit(kwst::cmd_gen_data(gen));
  });

  // Shared training flags.
  kwst::TrainCliOptions train;
  std::string mode_flag;
  int generations_flag = 0, epochs_flag = 0, batch_flag = 0;
  double alpha_flag = 0, lr_flag = 0, target_fa_flag = 0;
  std::uint64_t seed_flag = 0;
  auto add_train_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", train.config_path, "JSON run config");
    cmd->add_option("--manifest", train.manifest_path, "dataset manifest (JSON lines)");
    cmd->add_option("--out", train.out_dir, "run output directory");
    cmd->add_option("--mode", mode_flag,
                    "training mode: baseline_mp | mp_saug | st | st_saug | st_saug_ns");
    cmd->add_option("--generations", generations_flag, "student generations");
    cmd->add_option("--alpha", alpha_flag, "encoder loss weight");
    cmd->add_option("--lr", lr_flag, "learning rate");
    cmd->add_option("--epochs", epochs_flag, "training epochs");
    cmd->add_option("--batch-size", batch_flag, "batch size");
    cmd->add_option("--seed", seed_flag, "training seed");
    cmd->add_option("--target-fa", target_fa_flag, "report FR at this FA/h");
  };
  auto collect_train_flags = [&](CLI::App* cmd) {
    if (cmd->count("--mode")) train.mode = mode_flag;
    if (cmd->count("--generations")) train.generations = generations_flag;
    if (cmd->count("--alpha")) train.alpha = alpha_flag;
    if (cmd->count("--lr")) train.lr = lr_flag;
    if (cmd->count("--epochs")) train.epochs = epochs_flag;
    if (cmd->count("--batch-size")) train.batch_size = batch_flag;
    if (cmd->count("--seed")) train.seed = seed_flag;
    if (cmd->count("--target-fa")) train.target_fa = target_fa_flag;
  };

  auto* teach_cmd = app.add_subcommand("train-teacher", "stage-1 supervised teacher training");
  add_train_flags(teach_cmd);
  teach_cmd->callback([&] {
    collect_train_flags(teach_cmd);
    std::exit(kwst::cmd_train_teacher(train));
  });

  auto* self_cmd = app.add_subcommand("selftrain", "full noisy student-teacher pipeline");
  add_train_flags(self_cmd);
  self_cmd->callback([&] {
    collect_train_flags(self_cmd);
    std::exit(kwst::cmd_selftrain(train));
  });

  // evaluate
  kwst::EvaluateOptions ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "FA/h and FR at one threshold");
  eval_cmd->add_option("--checkpoint", ev.checkpoint_path, "model checkpoint")->required();
  eval_cmd->add_option("--manifest", ev.manifest_path, "dataset manifest")->required();
  eval_cmd->add_option("--split", ev.split, "split to evaluate (default test)");
  eval_cmd->add_option("--threshold", ev.threshold, "detection threshold in [0,1]");
  eval_cmd->add_option("--out", ev.out_path, "JSON report path");
  eval_cmd->callback([&] { std::exit(kwst::cmd_evaluate(ev)); });

  // roc
  kwst::RocOptions roc;
  auto* roc_cmd = app.add_subcommand("roc", "threshold sweep, ROC CSV/SVG and FR at target FA/h");
  roc_cmd->add_option("--checkpoint", roc.checkpoint_path, "model checkpoint")->required();
  roc_cmd->add_option("--manifest", roc.manifest_path, "dataset manifest")->required();
  roc_cmd->add_option("--split", roc.split, "split to evaluate (default test)");
  roc_cmd->add_option("--out", roc.out_dir, "output directory")->required();
  roc_cmd->add_option("--n-thresholds", roc.n_thresholds, "sweep resolution");
  roc_cmd->add_option("--target-fa", roc.target_fa, "operating point FA/h");
  roc_cmd->add_flag("--svg", roc.svg, "also write an SVG plot");
  roc_cmd->callback([&] { std::exit(kwst::cmd_roc(roc)); });

  // augment-preview
  kwst::PreviewOptions prev;
  auto* prev_cmd =
      app.add_subcommand("augment-preview", "write before/after spectrogram CSVs for one utterance");
  prev_cmd->add_option("--manifest", prev.manifest_path, "dataset manifest")->required();
  prev_cmd->add_option("--utterance", prev.utterance_id, "utterance id")->required();
  prev_cmd->add_option("--out", prev.out_dir, "output directory")->required();
  prev_cmd->add_option("--seed", prev.seed, "draw seed");
  prev_cmd->add_option("--policy", prev.policy_json, "augmentation policy as inline JSON");
  prev_cmd->callback([&] { std::exit(kwst::cmd_augment_preview(prev)); });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
