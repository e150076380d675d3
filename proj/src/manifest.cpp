#include "ibsbt/manifest.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ibsbt {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string fnv1a64_digest(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string digest_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read file for digest: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return fnv1a64_digest(buffer.str());
}

std::string utc_timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string manifest_to_json(const RunManifest& manifest) {
    nlohmann::ordered_json j;
    j["command"] = manifest.command;
    j["tool_version"] = manifest.tool_version;
    j["timestamp"] = manifest.timestamp;
    j["rng_seed"] = manifest.rng_seed;
    j["config"] = manifest.config;
    j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& input : manifest.inputs) {
        j["inputs"].push_back({{"path", input.path}, {"digest", input.digest}});
    }
    return j.dump(2) + "\n";
}

}  // namespace ibsbt
