#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wellbeing/core.hpp"
#include "wellbeing/csv.hpp"

namespace wellbeing {

// Fingerprint for manifest bookkeeping (FNV-1a over the raw bytes; not a
// cryptographic digest).
inline std::string file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (in.eof()) break;
    }
    char out[24];
    std::snprintf(out, sizeof(out), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return out;
}

// Every CLI run writes one of these next to its outputs; the recorded
// command, config, seeds and hashes are enough to reproduce the run.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    nlohmann::json resolved_config = nlohmann::json::object();
    uint64_t master_seed = 0;
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;

    void write(const std::filesystem::path& path) const {
        nlohmann::json j;
        j["command"] = command;
        j["argv"] = argv;
        j["config"] = resolved_config;
        j["seed"] = master_seed;
        const auto stamp = std::chrono::system_clock::now();
        j["timestamp_unix_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(stamp.time_since_epoch()).count();
        auto files = nlohmann::json::array();
        for (const auto& p : inputs) {
            files.push_back({{"role", "input"}, {"path", p.string()}, {"hash", file_fingerprint(p)}});
        }
        for (const auto& p : outputs) {
            files.push_back({{"role", "output"}, {"path", p.string()}, {"hash", file_fingerprint(p)}});
        }
        j["files"] = std::move(files);
        atomic_write_text(path, j.dump(1));
    }
};

}  // namespace wellbeing
