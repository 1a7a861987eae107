#include "selfpump/manifest.hpp"

#include <array>
#include <cstdio>
#include <memory>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "selfpump/csv.hpp"
#include "selfpump/error.hpp"

#ifndef SELFPUMP_VERSION
#define SELFPUMP_VERSION "0.0.0"
#endif

namespace selfpump
{
std::string sha256_hex(std::string_view bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
        throw Error("SHA-256 digest failed");
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string_view tool_version() { return SELFPUMP_VERSION; }

std::string RunManifest::to_json() const
{
    nlohmann::ordered_json j;
    j["config_sha256"] = config_sha256;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["started_utc"] = started_utc;
    j["wall_clock_s"] = wall_clock_s;
    return j.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path &out_dir, const RunManifest &manifest)
{
    write_text_file(out_dir / kManifestName, manifest.to_json());
}

} // namespace selfpump
