#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace asyncpd::cli {

struct OutputFile {
  std::string path;
  std::uint64_t bytes = 0;
  std::uint64_t rows = 0;  // newline count
  std::string hash;
};

/// Provenance record for a CLI run: inputs hashed, outputs described, wall
/// time and library version recorded.
struct RunManifest {
  std::string command;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> input_hashes;
  std::vector<OutputFile> outputs;
  std::string config_echo;  // JSON text
};

std::uint64_t fnv1a64_file(const std::string& path);
std::string hash_string(std::uint64_t h);
OutputFile describe_output(const std::string& path);
void write_manifest(const std::string& path, const RunManifest& manifest);

/// Re-reads every listed output and checks byte count, row count, and hash.
bool verify_manifest(const std::string& path);

}  // namespace asyncpd::cli
