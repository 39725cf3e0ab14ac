#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confrank/data.hpp"

namespace confrank {

// Synthetic non-stationary CTR stream. Labels are Bernoulli draws from a
// latent linear model over per-field categorical values; the latent weight
// vector rotates by drift_rate radians per day inside a fixed random
// 2-plane, so drift_rate = 0 keeps one model for every day.
struct DriftStreamConfig {
  uint32_t days = 10;
  uint32_t examples_per_day = 20000;
  double drift_rate = 0.2;
  double base_ctr = 0.1;
  uint64_t seed = 1;
  uint32_t field_count = 12;
  uint32_t vocab_per_field = 500;
  uint32_t hash_dim = 16384;
  double signal_scale = 1.0;  // std of the latent logit around its bias

  void validate() const;
  nlohmann::ordered_json to_json() const;
};

struct DriftStream {
  DriftStreamConfig config;
  FieldSchema schema;
  std::vector<Example> examples;       // timestamp = 1-based day index
  std::vector<double> true_probs;      // hidden ground truth, oracle use only
  std::vector<uint32_t> raw_value_ids; // row-major n x field_count, for export
};

DriftStream generate_drift_stream(const DriftStreamConfig& config);

// Raw value string for (field, value id); hash_field of this reproduces the
// stream's hashed indices.
std::string drift_raw_value(uint32_t field_index, uint32_t value_id);

// Export in the standard CSV format plus a `<path>.meta.json` sidecar with
// the generator parameters.
void write_stream_csv(const DriftStream& stream, const std::string& path);

}  // namespace confrank
