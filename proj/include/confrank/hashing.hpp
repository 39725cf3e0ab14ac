#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace confrank {

// FNV-1a, 64-bit, fixed published constants. Feature hashing and file
// digests both go through this so results are identical across platforms.
inline constexpr uint64_t kFnv64Offset = 0xcbf29ce484222325ull;
inline constexpr uint64_t kFnv64Prime = 0x100000001b3ull;

inline uint64_t fnv1a64(std::string_view bytes, uint64_t state = kFnv64Offset) {
  uint64_t h = state;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnv64Prime;
  }
  return h;
}

// Full 64-bit hash of (field_index, raw_value). The field index is mixed in
// first so the same raw value lands on independent indices per field.
uint64_t hash_field_raw(uint32_t field_index, std::string_view raw_value);

// Hashed index in [0, hash_dim). Index 0 is reserved for missing values:
// the empty string maps to 0 and no non-empty value ever does.
uint32_t hash_field(uint32_t field_index, std::string_view raw_value,
                    uint32_t hash_dim);

// FNV-1a digest of a whole file, for run manifests.
uint64_t file_digest(const std::string& path);

}  // namespace confrank
