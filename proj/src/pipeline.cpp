#include "confrank/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "confrank/error.hpp"
#include "confrank/optimizer.hpp"
#include "confrank/rng.hpp"
#include "confrank/snapshot_io.hpp"
#include "confrank/threads.hpp"

namespace confrank {

TrainMode parse_train_mode(const std::string& name) {
  if (name == "erm") return TrainMode::kERM;
  if (name == "cr" || name == "rcr") return TrainMode::kCR;
  if (name == "kd") return TrainMode::kKD;
  if (name == "rkd") return TrainMode::kRKD;
  throw UsageError("unknown mode: " + name + " (expected erm|cr|rcr|kd|rkd)");
}

std::string train_mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::kERM: return "erm";
    case TrainMode::kCR: return "cr";
    case TrainMode::kKD: return "kd";
    case TrainMode::kRKD: return "rkd";
  }
  return "?";
}

void TrainConfig::validate(Regime regime) const {
  arch.validate();
  if (batch_size == 0) throw UsageError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (!(adagrad_eps > 0.0)) throw UsageError("adagrad epsilon must be positive");
  if (!std::isfinite(weights.lambda_cr) || weights.lambda_cr < 0.0 ||
      !std::isfinite(weights.lambda_rcr) || weights.lambda_rcr < 0.0)
    throw UsageError("loss weights must be finite and non-negative");
  if (mode == TrainMode::kERM &&
      (weights.lambda_cr != 0.0 || weights.lambda_rcr != 0.0))
    throw UsageError("erm mode does not take lambda-cr/lambda-rcr");
  if (mode == TrainMode::kKD && !(kd_temperature > 0.0))
    throw UsageError("kd temperature must be positive");
  if (mode == TrainMode::kKD && (kd_mix < 0.0 || kd_mix > 1.0))
    throw UsageError("kd mixing weight must be in [0, 1]");
  if (mode == TrainMode::kRKD &&
      (!std::isfinite(lambda_rkd) || lambda_rkd < 0.0))
    throw UsageError("lambda-rkd must be finite and non-negative");
  if (regime == Regime::kStandard) {
    if (max_epochs == 0) throw UsageError("epochs must be positive");
    if (!(delta > 0.0)) throw UsageError("delta must be positive in the standard setting");
  }
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// Batch objective. teacher_ready is false while no teacher exists (warmup,
// epoch 1 without a fixed teacher); the objective is then plain CE for every
// mode so paired runs share the exact same prefix.
LossResult objective(const BatchLogits& batch, const TrainConfig& cfg,
                     bool teacher_ready) {
  if (!teacher_ready) return ce_loss(batch);
  switch (cfg.mode) {
    case TrainMode::kERM:
      return ce_loss(batch);
    case TrainMode::kCR:
      return combined_loss(batch, cfg.weights, cfg.phi);
    case TrainMode::kKD: {
      LossResult ce = ce_loss(batch);
      if (cfg.kd_mix == 0.0) return ce;
      LossResult kd = kd_loss(batch, cfg.kd_temperature);
      LossResult r;
      r.loss = (1.0 - cfg.kd_mix) * ce.loss + cfg.kd_mix * kd.loss;
      r.dloss_du.resize(ce.dloss_du.size());
      for (size_t i = 0; i < r.dloss_du.size(); ++i)
        r.dloss_du[i] =
            (1.0 - cfg.kd_mix) * ce.dloss_du[i] + cfg.kd_mix * kd.dloss_du[i];
      return r;
    }
    case TrainMode::kRKD: {
      LossResult r = ce_loss(batch);
      if (cfg.lambda_rkd == 0.0) return r;
      LossResult rkd = rkd_logit_loss(batch);
      r.loss += cfg.lambda_rkd * rkd.loss;
      for (size_t i = 0; i < r.dloss_du.size(); ++i)
        r.dloss_du[i] += cfg.lambda_rkd * rkd.dloss_du[i];
      return r;
    }
  }
  throw UsageError("unhandled train mode");
}

// Teacher logits for one batch: from the serving log, from a snapshot, or
// absent.
struct TeacherSource {
  const std::unordered_map<uint64_t, double>* log_index = nullptr;
  const ModelSnapshot* snapshot = nullptr;

  bool ready() const { return log_index != nullptr || snapshot != nullptr; }

  void fill(const std::vector<const Example*>& chunk, BatchLogits& batch) const {
    if (!ready()) {
      batch.teacher.clear();
      return;
    }
    batch.teacher.resize(chunk.size());
    if (log_index != nullptr) {
      for (size_t k = 0; k < chunk.size(); ++k) {
        auto it = log_index->find(chunk[k]->id);
        if (it == log_index->end())
          throw DataError("missing teacher logit for example " +
                          std::to_string(chunk[k]->id));
        batch.teacher[k] = it->second;
      }
    } else {
      for (size_t k = 0; k < chunk.size(); ++k)
        batch.teacher[k] = forward(*snapshot, *chunk[k]);
    }
  }
};

// One gradient pass over `examples` in the given order. Returns per-batch
// mean losses. Gradients accumulate per batch in example order and apply
// once per batch.
std::vector<double> train_pass(ModelSnapshot& snapshot, AdagradState& opt,
                               const std::vector<Example>& examples,
                               const std::vector<size_t>& order,
                               const TrainConfig& cfg,
                               const TeacherSource& teacher) {
  std::vector<double> curve;
  GradientBuffer buf;
  BatchLogits batch;
  const size_t n = order.size();
  std::vector<const Example*> chunk;
  for (size_t start = 0; start < n; start += cfg.batch_size) {
    size_t stop = std::min(n, start + cfg.batch_size);
    chunk.clear();
    for (size_t k = start; k < stop; ++k) chunk.push_back(&examples[order[k]]);

    batch.student.resize(chunk.size());
    batch.labels.resize(chunk.size());
    batch.ids.resize(chunk.size());
    for (size_t k = 0; k < chunk.size(); ++k) {
      batch.student[k] = forward(snapshot, *chunk[k]);
      batch.labels[k] = chunk[k]->label;
      batch.ids[k] = chunk[k]->id;
    }
    teacher.fill(chunk, batch);

    LossResult r = objective(batch, cfg, teacher.ready());
    buf.reset(snapshot.params.size());
    for (size_t k = 0; k < chunk.size(); ++k)
      backward(snapshot, *chunk[k], r.dloss_du[k], buf);
    snapshot = apply_update(snapshot, buf, opt);
    curve.push_back(r.loss);
  }
  return curve;
}

double mean_ce(const ModelSnapshot& snapshot, const std::vector<Example>& examples) {
  if (examples.empty()) throw DataError("cannot evaluate loss on empty split");
  std::vector<double> logits = batch_logits(snapshot, examples);
  BatchLogits batch;
  batch.student = std::move(logits);
  batch.labels.resize(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) batch.labels[i] = examples[i].label;
  return ce_loss(batch).loss;
}

std::vector<size_t> identity_order(size_t n) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

ModelSnapshot train_standard(const DatasetSplit& split, const TrainConfig& cfg) {
  cfg.validate(Regime::kStandard);
  if (split.train.empty()) throw DataError("training split is empty");

  ModelSnapshot fixed_teacher;
  bool has_fixed_teacher = !cfg.teacher_path.empty();
  if (has_fixed_teacher) {
    fixed_teacher = load_snapshot(cfg.teacher_path);
    if (fixed_teacher.arch.field_count != cfg.arch.field_count ||
        fixed_teacher.arch.hash_dim != cfg.arch.hash_dim)
      throw DataError("teacher snapshot schema does not match (fields " +
                      std::to_string(fixed_teacher.arch.field_count) + "/" +
                      std::to_string(cfg.arch.field_count) + ", hash_dim " +
                      std::to_string(fixed_teacher.arch.hash_dim) + "/" +
                      std::to_string(cfg.arch.hash_dim) + ")");
  }
  bool needs_validation = cfg.max_epochs > 1;
  if (needs_validation && split.validation.empty())
    throw DataError("standard training needs a validation split for early stopping");

  std::vector<Example> train = split.train;
  sort_by_time(train);

  ModelSnapshot snapshot = init_snapshot(cfg.arch, cfg.seed);
  AdagradState opt;
  opt.learning_rate = cfg.learning_rate;
  opt.epsilon = cfg.adagrad_eps;
  opt.init(snapshot.params.size());

  double prev_val = needs_validation ? mean_ce(snapshot, split.validation)
                                     : std::numeric_limits<double>::infinity();
  double best_val = std::numeric_limits<double>::infinity();
  ModelSnapshot best = snapshot;
  bool have_best = false;
  ModelSnapshot prev_epoch_snapshot;

  std::vector<size_t> order = identity_order(train.size());
  for (uint32_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) {
      Rng rng(splitmix64(cfg.seed ^ (0xe70c0000ull + epoch)));
      order = identity_order(train.size());
      rng.shuffle(order);
    }

    TeacherSource teacher;
    if (has_fixed_teacher) {
      teacher.snapshot = &fixed_teacher;
    } else if (epoch >= 2) {
      teacher.snapshot = &prev_epoch_snapshot;
    }

    train_pass(snapshot, opt, train, order, cfg, teacher);

    if (!needs_validation) return snapshot;

    double val = mean_ce(snapshot, split.validation);
    if (!have_best || val < best_val) {
      best_val = val;
      best = snapshot;
      have_best = true;
    }
    if (prev_val - val < cfg.delta) break;
    prev_val = val;
    prev_epoch_snapshot = snapshot;
  }
  return best;
}

}  // namespace

std::vector<double> batch_logits(const ModelSnapshot& snapshot,
                                 const std::vector<Example>& examples) {
  std::vector<double> logits(examples.size());
  parallel_for(examples.size(), [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) logits[i] = forward(snapshot, examples[i]);
  });
  return logits;
}

ModelSnapshot train_erm(const DatasetSplit& split, const TrainConfig& config) {
  TrainConfig cfg = config;
  cfg.mode = TrainMode::kERM;
  cfg.weights = LossWeights{};
  return train_standard(split, cfg);
}

ModelSnapshot train_standard_with_teacher(const DatasetSplit& split,
                                          const TrainConfig& config) {
  return train_standard(split, config);
}

std::pair<PredictionLog, MetricReport> serve_day(
    const ModelSnapshot& snapshot, const std::vector<Example>& day_examples) {
  std::vector<double> logits = batch_logits(snapshot, day_examples);
  PredictionLog log;
  log.records.reserve(day_examples.size());
  for (size_t i = 0; i < day_examples.size(); ++i)
    log.records.push_back({day_examples[i].id, snapshot.version, logits[i]});
  std::vector<uint8_t> labels(day_examples.size());
  for (size_t i = 0; i < day_examples.size(); ++i) labels[i] = day_examples[i].label;
  return {std::move(log), compute_report(logits, labels)};
}

std::pair<ModelSnapshot, CycleReport> one_pass_cycle(
    const ModelSnapshot& online, const std::vector<Example>& day_examples,
    const PredictionLog& log, const TrainConfig& config) {
  config.validate(Regime::kOnePass);
  if (day_examples.empty()) throw DataError("one_pass_cycle on an empty day");

  std::unordered_map<uint64_t, double> index;
  index.reserve(log.records.size());
  for (const auto& rec : log.records) {
    if (!index.emplace(rec.example_id, rec.online_logit).second)
      throw DataError("duplicate prediction-log record for example " +
                      std::to_string(rec.example_id));
  }

  std::vector<Example> day = day_examples;
  sort_by_time(day);

  // Day metrics of the served model, straight from the log.
  std::vector<double> served_logits(day.size());
  std::vector<uint8_t> labels(day.size());
  for (size_t i = 0; i < day.size(); ++i) {
    auto it = index.find(day[i].id);
    if (it == index.end())
      throw DataError("missing teacher logit for example " +
                      std::to_string(day[i].id));
    served_logits[i] = it->second;
    labels[i] = day[i].label;
  }

  CycleReport report;
  report.day = day_of(day.front().timestamp, config.timestamp_unit);
  report.served_version = online.version;
  report.metrics = compute_report(served_logits, labels);

  ModelSnapshot successor;
  if (config.cold_start) {
    successor = init_snapshot(config.arch,
                              splitmix64(config.seed ^ (0xc01d0000ull + report.day)));
    successor.version = online.version;
  } else {
    successor = online;
  }

  AdagradState opt;
  opt.learning_rate = config.learning_rate;
  opt.epsilon = config.adagrad_eps;
  opt.init(successor.params.size());

  TeacherSource teacher;
  teacher.log_index = &index;
  report.loss_curve =
      train_pass(successor, opt, day, identity_order(day.size()), config, teacher);

  double total = 0.0;
  for (double l : report.loss_curve) total += l;
  report.mean_train_loss =
      report.loss_curve.empty() ? 0.0 : total / static_cast<double>(report.loss_curve.size());
  report.produced_version = successor.version;
  return {std::move(successor), std::move(report)};
}

OnePassResult run_one_pass_experiment(const std::vector<Example>& stream,
                                      uint32_t warmup_days, uint32_t cycle_days,
                                      const TrainConfig& config) {
  config.validate(Regime::kOnePass);
  if (warmup_days == 0) throw UsageError("one-pass experiment needs at least one warmup day");

  std::vector<uint64_t> days = distinct_days(stream, config.timestamp_unit);
  size_t needed = static_cast<size_t>(warmup_days) + cycle_days;
  if (days.size() < needed)
    throw DataError("one-pass experiment needs " + std::to_string(needed) +
                    " days (" + std::to_string(warmup_days) + " warmup + " +
                    std::to_string(cycle_days) + " cycles), dataset has " +
                    std::to_string(days.size()));

  std::map<uint64_t, std::vector<Example>> by_day;
  for (const auto& ex : stream)
    by_day[day_of(ex.timestamp, config.timestamp_unit)].push_back(ex);

  // Warmup: single-pass CE over the first warmup_days in time order.
  std::vector<Example> warmup;
  for (uint32_t d = 0; d < warmup_days; ++d) {
    const auto& day = by_day[days[d]];
    warmup.insert(warmup.end(), day.begin(), day.end());
  }
  sort_by_time(warmup);

  ModelSnapshot online = init_snapshot(config.arch, config.seed);
  AdagradState opt;
  opt.learning_rate = config.learning_rate;
  opt.epsilon = config.adagrad_eps;
  opt.init(online.params.size());
  TrainConfig warmup_cfg = config;
  warmup_cfg.mode = TrainMode::kERM;
  warmup_cfg.weights = LossWeights{};
  train_pass(online, opt, warmup, identity_order(warmup.size()), warmup_cfg,
             TeacherSource{});

  OnePassResult result;
  for (uint32_t k = 0; k < cycle_days; ++k) {
    const auto& day = by_day[days[warmup_days + k]];
    auto [log, report] = serve_day(online, day);
    (void)report;  // one_pass_cycle recomputes the day report from the log
    auto [successor, cycle] = one_pass_cycle(online, day, log, config);
    result.reports.push_back(std::move(cycle));
    online = std::move(successor);
  }
  result.final_snapshot = std::move(online);
  return result;
}

ModelSnapshot run_baseline(const DatasetSplit& split, const TrainConfig& config) {
  if (config.mode == TrainMode::kCR)
    throw UsageError("run_baseline takes modes erm|kd|rkd");
  return train_standard_with_teacher(split, config);
}

OnePassResult run_baseline(const std::vector<Example>& stream,
                           uint32_t warmup_days, uint32_t cycle_days,
                           const TrainConfig& config) {
  if (config.mode == TrainMode::kCR)
    throw UsageError("run_baseline takes modes erm|kd|rkd");
  return run_one_pass_experiment(stream, warmup_days, cycle_days, config);
}

void PredictionLog::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write prediction log: " + path);
  out << "example_id,snapshot_version,online_logit\n";
  for (const auto& rec : records)
    out << rec.example_id << ',' << rec.snapshot_version << ','
        << format_double(rec.online_logit) << '\n';
  if (!out) throw DataError("failed writing prediction log: " + path);
}

PredictionLog PredictionLog::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open prediction log: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty prediction log: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "example_id,snapshot_version,online_logit")
    throw DataError("bad prediction log header in " + path);

  PredictionLog log;
  std::unordered_set<uint64_t> seen;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Record rec;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto eat = [&](auto& value, char sep) {
      auto [ptr, ec] = std::from_chars(p, end, value);
      bool bad = ec != std::errc() ||
                 (sep == '\0' ? ptr != end : (ptr == end || *ptr != sep));
      if (bad)
        throw DataError("malformed prediction log line " + std::to_string(line_no) +
                        " in " + path);
      p = ptr + (sep != '\0' ? 1 : 0);
    };
    eat(rec.example_id, ',');
    eat(rec.snapshot_version, ',');
    eat(rec.online_logit, '\0');
    if (!seen.insert(rec.example_id).second)
      throw DataError("duplicate prediction-log record for example " +
                      std::to_string(rec.example_id));
    log.records.push_back(rec);
  }
  return log;
}

nlohmann::ordered_json CycleReport::to_json() const {
  nlohmann::ordered_json j;
  j["day"] = day;
  j["served_version"] = served_version;
  j["produced_version"] = produced_version;
  j["metrics"] = metrics.to_json();
  j["mean_train_loss"] = mean_train_loss;
  j["loss_curve"] = loss_curve;
  return j;
}

}  // namespace confrank
