#pragma once

#include <filesystem>

#include "cxrisk/io.hpp"
#include "cxrisk/region.hpp"
#include "cxrisk/survival.hpp"
#include "cxrisk/synth.hpp"

namespace cxrisk {

enum class RunStatus { ok = 0, partial = 1 };

// Per-subject failures never abort a run; they land in the errors sidecar and
// flip the status to partial. Unrecoverable problems surface as exceptions.
struct RunResult {
  RunStatus status = RunStatus::ok;
  int subjects_total = 0;
  int subjects_failed = 0;
  std::vector<std::string> messages;
};

// Typed view of the key-value run configuration, defaults applied. Paths not
// set explicitly derive from out_dir so the subcommands chain on disk.
struct RunConfig {
  std::filesystem::path out_dir;
  std::filesystem::path features_dir;
  std::filesystem::path labels_path;
  std::filesystem::path boxes_dir;
  std::filesystem::path completed_dir;
  std::filesystem::path model_path;
  std::filesystem::path completer_path;
  std::filesystem::path predictions_path;

  std::vector<std::string> region_names;
  std::uint64_t seed = 0;
  double horizon = 2.0;
  int top_k = 5;
  std::uint32_t cam_height = 224;
  std::uint32_t cam_width = 224;
  double val_fraction = 0.125;  // 7:1 train:validation split of the ingested cohort

  TrainConfig train;
  bool train_completer = false;
  CompleterConfig completer;
  SynthConfig synth;

  ConfigMap raw;  // merged key-value view, echoed into manifests

  static RunConfig from_map(const ConfigMap& map);
};

RunResult run_synth(const RunConfig& cfg);
RunResult run_train(const RunConfig& cfg);
RunResult run_predict(const RunConfig& cfg);
RunResult run_cam(const RunConfig& cfg);
RunResult run_complete(const RunConfig& cfg);
RunResult run_report(const RunConfig& cfg);
RunResult run_evaluate(const RunConfig& cfg);

}  // namespace cxrisk
