#include "confrank/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "confrank/error.hpp"
#include "confrank/hashing.hpp"

namespace confrank {

void FieldSchema::validate() const {
  if (field_names.empty()) throw DataError("schema has no fields");
  if (hash_dim < 2) throw DataError("hash_dim must be >= 2");
  std::set<std::string> seen;
  for (const auto& name : field_names) {
    if (name.empty()) throw DataError("schema has an empty field name");
    if (!seen.insert(name).second)
      throw DataError("duplicate field name: " + name);
  }
}

TimestampUnit parse_timestamp_unit(const std::string& name) {
  if (name == "day") return TimestampUnit::kDayIndex;
  if (name == "epoch") return TimestampUnit::kEpochSeconds;
  throw UsageError("unknown timestamp unit: " + name + " (expected day|epoch)");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

uint64_t parse_u64(const std::string& s, const char* what, size_t line_no) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(std::string("line ") + std::to_string(line_no) +
                    ": malformed " + what + " value '" + s + "'");
  return v;
}

}  // namespace

std::vector<Example> load_csv(const std::string& path, const FieldSchema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty dataset file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_line(line);
  std::vector<std::string> expected = {"id", "timestamp", "label"};
  expected.insert(expected.end(), schema.field_names.begin(),
                  schema.field_names.end());
  if (header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw DataError("header mismatch in " + path + ": expected '" + want + "'");
  }

  const uint32_t nfields = schema.field_count();
  std::vector<Example> out;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != 3 + nfields)
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(3 + nfields) + " columns, got " +
                      std::to_string(cells.size()));
    Example ex;
    ex.id = parse_u64(cells[0], "id", line_no);
    ex.timestamp = parse_u64(cells[1], "timestamp", line_no);
    if (cells[2] == "0") {
      ex.label = 0;
    } else if (cells[2] == "1") {
      ex.label = 1;
    } else {
      throw DataError("line " + std::to_string(line_no) + ": label '" +
                      cells[2] + "' is not 0 or 1");
    }
    ex.indices.resize(nfields);
    for (uint32_t f = 0; f < nfields; ++f)
      ex.indices[f] = hash_field(f, cells[3 + f], schema.hash_dim);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<uint64_t> distinct_days(const std::vector<Example>& examples,
                                    TimestampUnit unit) {
  std::set<uint64_t> days;
  for (const auto& ex : examples) days.insert(day_of(ex.timestamp, unit));
  return {days.begin(), days.end()};
}

DatasetSplit temporal_split(const std::vector<Example>& examples,
                            int validation_days, int test_days,
                            TimestampUnit unit) {
  if (examples.empty()) throw DataError("cannot split an empty dataset");
  if (validation_days < 0 || test_days < 0)
    throw DataError("validation_days and test_days must be non-negative");

  std::vector<uint64_t> days = distinct_days(examples, unit);
  size_t needed = static_cast<size_t>(validation_days) + test_days + 1;
  if (days.size() < needed)
    throw DataError("temporal split needs at least " + std::to_string(needed) +
                    " distinct days, dataset has " + std::to_string(days.size()));

  // First day that is no longer train / no longer validation.
  size_t val_pos = days.size() - static_cast<size_t>(validation_days) -
                   static_cast<size_t>(test_days);
  size_t test_pos = days.size() - static_cast<size_t>(test_days);

  DatasetSplit split;
  for (const auto& ex : examples) {
    uint64_t d = day_of(ex.timestamp, unit);
    if (test_days > 0 && d >= days[test_pos]) {
      split.test.push_back(ex);
    } else if (validation_days > 0 && d >= days[val_pos]) {
      split.validation.push_back(ex);
    } else {
      split.train.push_back(ex);
    }
  }
  return split;
}

void sort_by_time(std::vector<Example>& examples) {
  std::stable_sort(examples.begin(), examples.end(),
                   [](const Example& a, const Example& b) {
                     if (a.timestamp != b.timestamp)
                       return a.timestamp < b.timestamp;
                     return a.id < b.id;
                   });
}

}  // namespace confrank
