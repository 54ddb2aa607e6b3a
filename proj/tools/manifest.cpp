#include "manifest.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "vocadapt/errors.hpp"

namespace vocadapt::cli {

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + hex;
}

nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& config,
                             const std::vector<std::filesystem::path>& inputs) {
  nlohmann::json manifest;
  manifest["tool"] = "vocadapt";
#ifdef VOCADAPT_VERSION
  manifest["version"] = VOCADAPT_VERSION;
#else
  manifest["version"] = "unknown";
#endif
  manifest["subcommand"] = subcommand;

  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&tt, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
  manifest["timestamp_utc"] = stamp;

  manifest["config"] = config;
  nlohmann::json hashes = nlohmann::json::object();
  for (const auto& input : inputs) {
    hashes[input.string()] = hash_file(input);
  }
  manifest["inputs"] = hashes;
  return manifest;
}

void write_json(const nlohmann::json& value, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << value.dump(2) << '\n';
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoError, "write failure on " + path.string());
  }
}

}  // namespace vocadapt::cli
