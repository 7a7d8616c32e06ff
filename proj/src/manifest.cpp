#include "rdpp/manifest.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "rdpp/errors.hpp"

namespace rdpp {

void write_manifest(const Manifest& manifest, const std::string& path) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(manifest.corpus_hash));

  nlohmann::json j;
  j["format_version"] = 1;
  j["command"] = manifest.command;
  j["config"] = manifest.config;
  j["seed"] = std::to_string(manifest.seed);
  j["corpus_hash"] = hash;
  j["outputs"] = manifest.outputs;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open manifest '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw FormatError("write to manifest '" + path + "' failed");
}

}  // namespace rdpp
