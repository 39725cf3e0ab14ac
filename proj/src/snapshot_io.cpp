#include "confrank/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "confrank/error.hpp"
#include "confrank/hashing.hpp"

namespace confrank {

namespace {

constexpr char kMagic[8] = {'C', 'R', 'S', 'N', 'A', 'P', '0', '1'};

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t get_u32(const char* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

uint64_t get_u64(const char* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

void save_snapshot(const ModelSnapshot& s, const std::string& path) {
  nlohmann::ordered_json manifest = {
      {"format_version", 1},
      {"kind", arch_kind_name(s.arch.kind)},
      {"field_count", s.arch.field_count},
      {"hash_dim", s.arch.hash_dim},
      {"embedding_dim", s.arch.embedding_dim},
      {"hidden_units", s.arch.hidden_units},
      {"version", s.version},
      {"rng_seed", s.rng_seed},
      {"param_count", s.params.size()},
  };
  std::string m = manifest.dump();

  std::string out;
  out.reserve(16 + m.size() + 4 * s.params.size() + 8);
  out.append(kMagic, 8);
  put_u32(out, static_cast<uint32_t>(m.size()));
  out += m;
  for (float f : s.params) put_u32(out, std::bit_cast<uint32_t>(f));
  put_u64(out, fnv1a64(out));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write snapshot: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw DataError("failed writing snapshot: " + path);
}

ModelSnapshot load_snapshot(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open snapshot: " + path);
  std::string bytes((std::istreambuf_iterator<char>(file)),
                    std::istreambuf_iterator<char>());

  if (bytes.size() < 12 + 8 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw DataError("truncated or invalid snapshot file: " + path);
  uint32_t mlen = get_u32(bytes.data() + 8);
  size_t payload_off = 12 + static_cast<size_t>(mlen);
  if (bytes.size() < payload_off + 8)
    throw DataError("truncated snapshot file: " + path);

  uint64_t stored = get_u64(bytes.data() + bytes.size() - 8);
  uint64_t actual = fnv1a64(std::string_view(bytes.data(), bytes.size() - 8));
  if (stored != actual)
    throw DataError("checksum mismatch in snapshot file: " + path);

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.substr(12, mlen));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid snapshot manifest in " + path + ": " + e.what());
  }
  if (manifest.value("format_version", 0) != 1)
    throw DataError("unsupported snapshot format version in " + path);

  ModelSnapshot s;
  s.arch.kind = parse_arch_kind(manifest.at("kind").get<std::string>());
  s.arch.field_count = manifest.at("field_count").get<uint32_t>();
  s.arch.hash_dim = manifest.at("hash_dim").get<uint32_t>();
  s.arch.embedding_dim = manifest.at("embedding_dim").get<uint32_t>();
  s.arch.hidden_units = manifest.at("hidden_units").get<uint32_t>();
  s.version = manifest.at("version").get<uint64_t>();
  s.rng_seed = manifest.at("rng_seed").get<uint64_t>();
  s.arch.validate();

  size_t payload_len = bytes.size() - payload_off - 8;
  size_t expected = s.arch.param_count();
  uint64_t declared = manifest.at("param_count").get<uint64_t>();
  if (declared != expected || payload_len != expected * 4)
    throw DataError("descriptor mismatch in snapshot file " + path +
                    ": descriptor implies " + std::to_string(expected) +
                    " parameters, payload holds " +
                    std::to_string(payload_len / 4));

  s.params.resize(expected);
  for (size_t i = 0; i < expected; ++i)
    s.params[i] = std::bit_cast<float>(get_u32(bytes.data() + payload_off + 4 * i));
  return s;
}

}  // namespace confrank
