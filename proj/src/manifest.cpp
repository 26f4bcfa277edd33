#include "airq/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "airq/errors.hpp"

namespace airq {

const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a_bytes(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for hashing: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a_bytes(buf.str());
}

void RunManifest::add_output(const std::string& path) {
    output_checksums[path] = fnv1a_file(path);
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["config_path"] = config_path;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["threads"] = threads;
    j["tool_version"] = tool_version;
    if (!params.empty()) {
        nlohmann::json extra = nlohmann::json::object();
        for (const auto& [k, v] : params) extra[k] = v;
        j["params"] = std::move(extra);
    }
    nlohmann::json outputs = nlohmann::json::object();
    for (const auto& [p, checksum] : output_checksums) outputs[p] = checksum;
    j["outputs"] = std::move(outputs);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace airq
