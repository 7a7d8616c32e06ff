#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rdpp {

/// Reproducibility record written next to every run's outputs. Holds
/// everything needed to regenerate them bit-exactly; deliberately no
/// timestamps or host details.
struct Manifest {
  std::string command;
  std::map<std::string, std::string> config;  ///< resolved settings
  std::uint64_t seed = 0;
  std::uint64_t corpus_hash = 0;
  std::vector<std::string> outputs;  ///< files the run wrote
};

void write_manifest(const Manifest& manifest, const std::string& path);

}  // namespace rdpp
