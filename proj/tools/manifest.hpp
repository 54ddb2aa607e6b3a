#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace vocadapt::cli {

/// FNV-1a 64-bit over the file bytes, as `fnv1a64:<hex>`.
std::string hash_file(const std::filesystem::path& path);

/// Reproducibility record written next to every artifact-producing run:
/// tool version, resolved configuration, input hashes. The timestamp is
/// the only wall-clock-dependent field any command emits.
nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& config,
                             const std::vector<std::filesystem::path>& inputs);

void write_json(const nlohmann::json& value, const std::filesystem::path& path);

}  // namespace vocadapt::cli
