#include "confrank/hashing.hpp"

#include <fstream>
#include <vector>

#include "confrank/error.hpp"

namespace confrank {

uint64_t hash_field_raw(uint32_t field_index, std::string_view raw_value) {
  char prefix[4] = {static_cast<char>(field_index & 0xff),
                    static_cast<char>((field_index >> 8) & 0xff),
                    static_cast<char>((field_index >> 16) & 0xff),
                    static_cast<char>((field_index >> 24) & 0xff)};
  uint64_t h = fnv1a64(std::string_view(prefix, 4));
  return fnv1a64(raw_value, h);
}

uint32_t hash_field(uint32_t field_index, std::string_view raw_value,
                    uint32_t hash_dim) {
  if (raw_value.empty()) return 0;
  uint64_t h = hash_field_raw(field_index, raw_value);
  return 1u + static_cast<uint32_t>(h % (hash_dim - 1));
}

uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for digest: " + path);
  uint64_t h = kFnv64Offset;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a64(std::string_view(buf.data(), static_cast<size_t>(in.gcount())), h);
  }
  return h;
}

}  // namespace confrank
