#pragma once

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpncast/common.hpp"

namespace gpncast {

/// FNV-1a of a file's raw bytes, as a hex string.
inline std::string file_fnv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "' for hashing");
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 15];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return to_hex(h);
}

/// Audit record for one CLI invocation. This is the only artifact that
/// carries a wall-clock timestamp; everything a run produces for downstream
/// consumption must be byte-stable across reruns, so hashes of those outputs
/// live here instead of timestamps living there.
struct RunManifest {
    std::string command;
    std::string tool_version = kVersion;
    std::string started_utc;  // ISO 8601, filled by stamp()
    std::map<std::string, std::string> params;
    std::map<std::string, std::string> input_hashes;   // path -> fnv1a64
    std::map<std::string, std::string> output_hashes;  // path -> fnv1a64

    void stamp() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        started_utc = buf;
    }

    void add_input(const std::string& path) { input_hashes[path] = file_fnv(path); }
    void add_output(const std::string& path) { output_hashes[path] = file_fnv(path); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["tool_version"] = tool_version;
        j["started_utc"] = started_utc;
        j["params"] = params;
        j["inputs"] = input_hashes;
        j["outputs"] = output_hashes;
        return j;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write run manifest '" + path + "'");
        out << to_json().dump(2) << "\n";
    }
};

}  // namespace gpncast
