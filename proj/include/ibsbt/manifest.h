#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ibsbt {

// Reproducibility trailer written next to every CLI output: the exact
// command, effective config, and a content digest of every input file.
struct RunManifest {
    std::string command;
    std::string tool_version;
    std::string timestamp;  // ISO-8601 UTC
    std::uint64_t rng_seed = 0;
    std::map<std::string, std::string> config;

    struct InputFile {
        std::string path;
        std::string digest;
    };
    std::vector<InputFile> inputs;
};

std::uint64_t fnv1a64(std::string_view bytes);

// "fnv1a64:<16 hex digits>"
std::string fnv1a64_digest(std::string_view bytes);
std::string digest_file(const std::filesystem::path& path);  // throws if unreadable

std::string utc_timestamp_now();

std::string manifest_to_json(const RunManifest& manifest);

}  // namespace ibsbt
