#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "confrank/data.hpp"
#include "confrank/losses.hpp"
#include "confrank/metrics.hpp"
#include "confrank/model.hpp"

namespace confrank {

// Objective selector. The training regime (one-pass vs. standard) is chosen
// by the entry point: train_* run the standard multi-epoch setting,
// run_one_pass_experiment runs the serve-then-train cycle.
enum class TrainMode { kERM, kCR, kKD, kRKD };

TrainMode parse_train_mode(const std::string& name);
std::string train_mode_name(TrainMode mode);

enum class Regime { kOnePass, kStandard };

struct TrainConfig {
  ArchDescriptor arch;
  TrainMode mode = TrainMode::kERM;
  LossWeights weights;
  Scoring phi = Scoring::kLogistic;
  double learning_rate = 0.05;
  double adagrad_eps = 1e-8;
  uint32_t batch_size = 256;
  uint32_t max_epochs = 10;
  double delta = 1e-4;  // early-stop threshold on validation loss improvement
  uint64_t seed = 1;
  // Optional fixed teacher snapshot. When set, teacher terms are active from
  // epoch 1; otherwise the standard regime uses the previous epoch's snapshot
  // starting at epoch 2.
  std::string teacher_path;
  double kd_mix = 0.5;
  double kd_temperature = 2.0;
  double lambda_rkd = 0.5;
  bool cold_start = false;  // one-pass successors restart from fresh init
  bool shuffle_each_epoch = true;
  TimestampUnit timestamp_unit = TimestampUnit::kDayIndex;

  void validate(Regime regime) const;
};

// Append-only record of the online model's logits on served traffic.
struct PredictionLog {
  struct Record {
    uint64_t example_id = 0;
    uint64_t snapshot_version = 0;
    double online_logit = 0.0;
  };
  std::vector<Record> records;

  void save_csv(const std::string& path) const;
  static PredictionLog load_csv(const std::string& path);
};

struct CycleReport {
  uint64_t day = 0;
  uint64_t served_version = 0;
  uint64_t produced_version = 0;
  MetricReport metrics;  // the served model on the day's traffic, pre-training
  std::vector<double> loss_curve;  // mean training loss per batch
  double mean_train_loss = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Logits of a snapshot over a set of examples; forward passes may run in
// parallel (capped by CONFRANK_THREADS), each writing its own slot.
std::vector<double> batch_logits(const ModelSnapshot& snapshot,
                                 const std::vector<Example>& examples);

// Cross-entropy training in the standard regime: mini-batch epochs, early
// stop when validation loss improves by less than delta, best-validation
// snapshot returned.
ModelSnapshot train_erm(const DatasetSplit& split, const TrainConfig& config);

// Standard regime with the configured objective. Epoch 1 trains with plain
// cross-entropy unless a fixed teacher is configured; afterwards the
// previous epoch's final snapshot supplies teacher logits, recomputed per
// batch.
ModelSnapshot train_standard_with_teacher(const DatasetSplit& split,
                                          const TrainConfig& config);

// Logs the snapshot's logit for every example of the day and reports the
// day's metrics from those logits. The snapshot is not modified.
std::pair<PredictionLog, MetricReport> serve_day(
    const ModelSnapshot& snapshot, const std::vector<Example>& day_examples);

// Clones the online snapshot and trains it one pass over the day in
// (timestamp, id) order, teacher logits taken from the serving log. The
// online snapshot itself is never mutated.
std::pair<ModelSnapshot, CycleReport> one_pass_cycle(
    const ModelSnapshot& online, const std::vector<Example>& day_examples,
    const PredictionLog& log, const TrainConfig& config);

struct OnePassResult {
  std::vector<CycleReport> reports;
  ModelSnapshot final_snapshot;
};

// Warmup: single-pass cross-entropy over the first warmup_days. Then for
// each of cycle_days: serve the day, train the successor on it, promote.
OnePassResult run_one_pass_experiment(const std::vector<Example>& stream,
                                      uint32_t warmup_days, uint32_t cycle_days,
                                      const TrainConfig& config);

// Baseline entry points: identical harnesses with the baseline objective
// substituted. Modes kERM, kKD, kRKD only.
ModelSnapshot run_baseline(const DatasetSplit& split, const TrainConfig& config);
OnePassResult run_baseline(const std::vector<Example>& stream,
                           uint32_t warmup_days, uint32_t cycle_days,
                           const TrainConfig& config);

}  // namespace confrank
