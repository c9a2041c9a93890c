#ifndef NSFSA_IO_MANIFEST_HPP
#define NSFSA_IO_MANIFEST_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace nsfsa {

constexpr const char* kVersion = "0.1.0";

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_hash(const std::string& path);

struct ManifestFile {
  std::string role;
  std::string path;
  std::string hash;
};

/// Everything needed to rerun a command: its arguments (output directory
/// excluded), the configuration, seeds and the hashes of inputs and outputs.
struct Manifest {
  std::string command;
  std::vector<std::string> args;
  std::string config_text;
  std::uint64_t seed = 0;
  std::vector<ManifestFile> inputs;
  std::vector<ManifestFile> outputs;
  nlohmann::json summary = nlohmann::json::object();

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
  static Manifest load(const std::string& path);
  /// Throws ConfigError naming the first input whose content changed.
  void verify_inputs() const;
};

}  // namespace nsfsa

#endif  // NSFSA_IO_MANIFEST_HPP
