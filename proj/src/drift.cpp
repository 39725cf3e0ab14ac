#include "confrank/drift.hpp"

#include <cmath>
#include <fstream>

#include "confrank/error.hpp"
#include "confrank/hashing.hpp"
#include "confrank/losses.hpp"
#include "confrank/rng.hpp"

namespace confrank {

void DriftStreamConfig::validate() const {
  if (days == 0) throw DataError("days must be positive");
  if (examples_per_day == 0) throw DataError("examples_per_day must be positive");
  if (!(drift_rate >= 0.0) || !std::isfinite(drift_rate))
    throw DataError("drift_rate must be non-negative");
  if (!(base_ctr > 0.0 && base_ctr < 1.0))
    throw DataError("base_ctr must be in (0, 1)");
  if (field_count == 0) throw DataError("field_count must be positive");
  if (vocab_per_field == 0) throw DataError("vocab_per_field must be positive");
  if (hash_dim < 2) throw DataError("hash_dim must be >= 2");
  if (!(signal_scale > 0.0)) throw DataError("signal_scale must be positive");
}

nlohmann::ordered_json DriftStreamConfig::to_json() const {
  return nlohmann::ordered_json{
      {"days", days},
      {"examples_per_day", examples_per_day},
      {"drift_rate", drift_rate},
      {"base_ctr", base_ctr},
      {"seed", seed},
      {"field_count", field_count},
      {"vocab_per_field", vocab_per_field},
      {"hash_dim", hash_dim},
      {"signal_scale", signal_scale},
  };
}

std::string drift_raw_value(uint32_t field_index, uint32_t value_id) {
  return "f" + std::to_string(field_index) + "_v" + std::to_string(value_id);
}

DriftStream generate_drift_stream(const DriftStreamConfig& config) {
  config.validate();

  DriftStream stream;
  stream.config = config;
  stream.schema.hash_dim = config.hash_dim;
  for (uint32_t f = 0; f < config.field_count; ++f)
    stream.schema.field_names.push_back("field" + std::to_string(f));

  const size_t latent_n =
      static_cast<size_t>(config.field_count) * config.vocab_per_field;
  // Two independent latent weight vectors span the rotation plane. Per-value
  // weights scale with 1/sqrt(F) so the summed logit has std ~ signal_scale.
  const double w_scale =
      config.signal_scale / std::sqrt(static_cast<double>(config.field_count));
  std::vector<double> w_a(latent_n), w_b(latent_n);
  Rng latent_rng(splitmix64(config.seed ^ 0x6c61746e74ull));
  for (size_t i = 0; i < latent_n; ++i) w_a[i] = latent_rng.next_normal() * w_scale;
  for (size_t i = 0; i < latent_n; ++i) w_b[i] = latent_rng.next_normal() * w_scale;

  // Bias correction for the logistic-normal mean so the realized CTR tracks
  // base_ctr: E[sigmoid(b + z)] ~ sigmoid(b / sqrt(1 + pi s^2 / 8)).
  const double s2 = config.signal_scale * config.signal_scale;
  const double bias = std::log(config.base_ctr / (1.0 - config.base_ctr)) *
                      std::sqrt(1.0 + 3.141592653589793 * s2 / 8.0);

  const size_t total =
      static_cast<size_t>(config.days) * config.examples_per_day;
  stream.examples.reserve(total);
  stream.true_probs.reserve(total);
  stream.raw_value_ids.reserve(total * config.field_count);

  std::vector<double> w_day(latent_n);
  uint64_t next_id = 1;
  for (uint32_t day = 1; day <= config.days; ++day) {
    double angle = config.drift_rate * static_cast<double>(day - 1);
    double c = std::cos(angle), s = std::sin(angle);
    for (size_t i = 0; i < latent_n; ++i) w_day[i] = c * w_a[i] + s * w_b[i];

    Rng day_rng(splitmix64(config.seed ^ (0x64617900ull + day)));
    for (uint32_t e = 0; e < config.examples_per_day; ++e) {
      Example ex;
      ex.id = next_id++;
      ex.timestamp = day;
      ex.indices.resize(config.field_count);
      double logit = bias;
      for (uint32_t f = 0; f < config.field_count; ++f) {
        uint32_t value_id =
            static_cast<uint32_t>(day_rng.next_below(config.vocab_per_field));
        stream.raw_value_ids.push_back(value_id);
        logit += w_day[static_cast<size_t>(f) * config.vocab_per_field + value_id];
        ex.indices[f] = hash_field(f, drift_raw_value(f, value_id), config.hash_dim);
      }
      double p = sigmoid(logit);
      ex.label = day_rng.next_bernoulli(p) ? 1 : 0;
      stream.true_probs.push_back(p);
      stream.examples.push_back(std::move(ex));
    }
  }
  return stream;
}

void write_stream_csv(const DriftStream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write dataset: " + path);

  out << "id,timestamp,label";
  for (const auto& name : stream.schema.field_names) out << ',' << name;
  out << '\n';

  const uint32_t nfields = stream.config.field_count;
  for (size_t i = 0; i < stream.examples.size(); ++i) {
    const Example& ex = stream.examples[i];
    out << ex.id << ',' << ex.timestamp << ',' << static_cast<int>(ex.label);
    for (uint32_t f = 0; f < nfields; ++f)
      out << ',' << drift_raw_value(f, stream.raw_value_ids[i * nfields + f]);
    out << '\n';
  }
  if (!out) throw DataError("failed writing dataset: " + path);

  nlohmann::ordered_json sidecar = stream.config.to_json();
  sidecar["format"] = "confrank-gen-v1";
  std::ofstream meta(path + ".meta.json", std::ios::binary | std::ios::trunc);
  if (!meta) throw DataError("cannot write sidecar: " + path + ".meta.json");
  meta << sidecar.dump(2) << '\n';
}

}  // namespace confrank
