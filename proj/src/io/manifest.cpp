#include "nsfsa/io/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nsfsa/common.hpp"

namespace nsfsa {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return fnv1a_hex(buf.str());
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["args"] = args;
  j["config"] = config_text;
  j["config_hash"] = fnv1a_hex(config_text);
  j["seed"] = seed;
  auto files = [](const std::vector<ManifestFile>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : list) arr.push_back({{"role", f.role}, {"path", f.path}, {"fnv1a64", f.hash}});
    return arr;
  };
  j["inputs"] = files(inputs);
  j["outputs"] = files(outputs);
  j["summary"] = summary;
  return j;
}

Manifest Manifest::from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    m.config_text = j.value("config", std::string());
    m.seed = j.value("seed", std::uint64_t{0});
    for (const auto& f : j.at("inputs")) {
      m.inputs.push_back({f.at("role").get<std::string>(), f.at("path").get<std::string>(),
                          f.at("fnv1a64").get<std::string>()});
    }
    for (const auto& f : j.value("outputs", nlohmann::json::array())) {
      m.outputs.push_back({f.at("role").get<std::string>(), f.at("path").get<std::string>(),
                           f.at("fnv1a64").get<std::string>()});
    }
    m.summary = j.value("summary", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
}

void Manifest::verify_inputs() const {
  for (const auto& f : inputs) {
    if (file_hash(f.path) != f.hash) {
      throw ConfigError("input '" + f.path + "' (" + f.role + ") changed since the manifest was written");
    }
  }
}

}  // namespace nsfsa
