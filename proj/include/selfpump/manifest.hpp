#ifndef SELFPUMP_MANIFEST_HPP
#define SELFPUMP_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace selfpump
{
// Lowercase hex SHA-256 of the bytes given.
std::string sha256_hex(std::string_view bytes);

std::string_view tool_version();

struct RunManifest
{
    std::string config_sha256;
    std::string tool_version;
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs; // relative to the output directory
    std::string started_utc;
    double wall_clock_s = 0.0;

    std::string to_json() const;
};

// Written next to the outputs; it carries timestamps, so it is the one file
// that differs between otherwise identical runs.
inline constexpr std::string_view kManifestName = "run_manifest.json";

void write_manifest(const std::filesystem::path &out_dir, const RunManifest &manifest);

} // namespace selfpump

#endif // SELFPUMP_MANIFEST_HPP
