#pragma once

#include <string>

#include "confrank/model.hpp"

namespace confrank {

// Snapshot file, format version 1:
//   magic "CRSNAP01" | u32 manifest length | manifest JSON |
//   params as little-endian IEEE-754 f32 | u64 FNV-1a checksum of all
//   preceding bytes.
// Round-trips bit-exactly. Load distinguishes truncated files, descriptor
// mismatches and checksum failures.
void save_snapshot(const ModelSnapshot& snapshot, const std::string& path);
ModelSnapshot load_snapshot(const std::string& path);

}  // namespace confrank
