#include "manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "asyncpd/errors.hpp"
#include "asyncpd/version.hpp"

namespace asyncpd::cli {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::uint64_t fnv1a64_file(const std::string& path) { return fnv1a64(read_file(path)); }

std::string hash_string(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

OutputFile describe_output(const std::string& path) {
  const std::string data = read_file(path);
  OutputFile f;
  f.path = path;
  f.bytes = data.size();
  f.rows = static_cast<std::uint64_t>(std::count(data.begin(), data.end(), '\n'));
  f.hash = hash_string(fnv1a64(data));
  return f;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  json j;
  j["version"] = kVersion;
  j["command"] = manifest.command;
  j["wall_seconds"] = manifest.wall_seconds;
  json inputs = json::object();
  for (const auto& [file, hash] : manifest.input_hashes) inputs[file] = hash;
  j["input_hashes"] = inputs;
  json outputs = json::array();
  for (const auto& f : manifest.outputs)
    outputs.push_back(
        {{"path", f.path}, {"bytes", f.bytes}, {"rows", f.rows}, {"hash", f.hash}});
  j["outputs"] = outputs;
  if (!manifest.config_echo.empty())
    j["config"] = json::parse(manifest.config_echo);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

bool verify_manifest(const std::string& path) {
  const json j = json::parse(read_file(path));
  for (const auto& f : j.at("outputs")) {
    OutputFile now;
    try {
      now = describe_output(f.at("path").get<std::string>());
    } catch (const ValidationError&) {
      return false;
    }
    if (now.bytes != f.at("bytes").get<std::uint64_t>()) return false;
    if (now.rows != f.at("rows").get<std::uint64_t>()) return false;
    if (now.hash != f.at("hash").get<std::string>()) return false;
  }
  return true;
}

}  // namespace asyncpd::cli
