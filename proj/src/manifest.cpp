#include "confrank/manifest.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "confrank/error.hpp"
#include "confrank/hashing.hpp"

namespace confrank {

std::string utc_now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

void RunManifest::add_input(const std::string& name, const std::string& path) {
  char digest[19];
  std::snprintf(digest, sizeof(digest), "0x%016llx",
                static_cast<unsigned long long>(file_digest(path)));
  inputs[name] = nlohmann::ordered_json{{"path", path}, {"fnv64", digest}};
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "confrank";
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["config"] = config;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc;
  j["status"] = status;
  return j;
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest: " + path);
  out << to_json().dump(2) << '\n';
  if (!out) throw DataError("failed writing manifest: " + path);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

nlohmann::ordered_json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("invalid JSON config " + path + ": " + e.what());
    }
    // Manifest replay: take the embedded config.
    if (j.contains("config") && j["config"].is_object()) return j["config"];
    return j;
  }

  // Flat key=value, one per line, # comments.
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  std::istringstream lines(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(line_no) + " in " + path +
                      " is not key=value");
    std::string key = trim(entry.substr(0, eq));
    std::string value = trim(entry.substr(eq + 1));
    if (key.empty())
      throw DataError("config line " + std::to_string(line_no) + " in " + path +
                      " has an empty key");
    j[key] = value;
  }
  return j;
}

}  // namespace confrank
