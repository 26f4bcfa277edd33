#pragma once
#include <cstdint>
#include <map>
#include <string>

namespace airq {

// Every artifact-writing subcommand records what produced its outputs:
// the config file hash, the seed, tool version, and a checksum per output.
struct RunManifest {
    std::string subcommand;
    std::string config_path;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string tool_version;
    std::map<std::string, std::string> params;               // extra rerun inputs
    std::map<std::string, std::uint64_t> output_checksums;  // path -> FNV-1a

    void add_output(const std::string& path);  // hashes the file content
    void write(const std::string& path) const;
};

std::uint64_t fnv1a_file(const std::string& path);
std::uint64_t fnv1a_bytes(const std::string& bytes);

extern const char* kToolVersion;

}  // namespace airq
