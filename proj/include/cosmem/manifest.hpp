#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cosmem {

std::string sha256_hex(std::span<const unsigned char> data);
std::string sha256_hex_of_file(const std::string& path);

// Replay record written next to every command's outputs. Deliberately holds
// nothing volatile (no wall-clock time, no host name) so reruns with the same
// inputs produce byte-identical manifests.
struct RunManifest {
  std::string command;                        // subcommand name
  std::vector<std::string> arguments;         // raw argv tail
  std::vector<std::pair<std::string, std::string>> inputs; // path, sha256
  std::vector<std::uint64_t> seeds;
  std::string version;
  std::string config_json; // configuration snapshot, "{}" if none
  std::vector<std::string> outputs;            // file names in the out dir

  std::string to_json() const;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

} // namespace cosmem
