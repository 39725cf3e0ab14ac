#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace confrank {

struct FieldSchema {
  std::vector<std::string> field_names;
  uint32_t hash_dim = 0;

  uint32_t field_count() const {
    return static_cast<uint32_t>(field_names.size());
  }
  // Unique non-empty names, hash_dim >= 2.
  void validate() const;
};

// One labeled impression. Exactly one hashed index per field; index 0 is the
// reserved missing-value slot.
struct Example {
  uint64_t id = 0;
  uint64_t timestamp = 0;
  uint8_t label = 0;
  std::vector<uint32_t> indices;
};

struct DatasetSplit {
  std::vector<Example> train;
  std::vector<Example> validation;
  std::vector<Example> test;
};

enum class TimestampUnit { kDayIndex, kEpochSeconds };

inline uint64_t day_of(uint64_t timestamp, TimestampUnit unit) {
  return unit == TimestampUnit::kDayIndex ? timestamp : timestamp / 86400;
}

TimestampUnit parse_timestamp_unit(const std::string& name);

// CSV with header `id,timestamp,label,<field names...>`. Field values are
// hashed on load; empty cells map to index 0. Labels must parse as 0 or 1.
std::vector<Example> load_csv(const std::string& path, const FieldSchema& schema);

// Splits off the last `test_days` distinct days as test and the
// `validation_days` before them as validation; everything earlier trains.
// Input order is preserved within each split.
DatasetSplit temporal_split(const std::vector<Example>& examples,
                            int validation_days, int test_days,
                            TimestampUnit unit = TimestampUnit::kDayIndex);

// Distinct days present, ascending.
std::vector<uint64_t> distinct_days(const std::vector<Example>& examples,
                                    TimestampUnit unit = TimestampUnit::kDayIndex);

// Stable (timestamp, id) ordering used everywhere training order matters.
void sort_by_time(std::vector<Example>& examples);

}  // namespace confrank
