#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

namespace parity {

using Json = nlohmann::json;

/// Opens dir/name for writing, creating the directory first; throws on
/// failure.
std::ofstream open_out(const std::string& dir, const std::string& name);

/// Parses a JSON file; throws on missing file or parse error.
Json load_json_file(const std::string& path);

/// Writes dir/manifest.json with the run metadata: experiment name, master
/// seed, config echo, wall time, toolchain versions.
void write_manifest(const std::string& dir, const std::string& experiment,
                    const Json& config_echo, std::uint64_t seed,
                    double wall_seconds);

}  // namespace parity
