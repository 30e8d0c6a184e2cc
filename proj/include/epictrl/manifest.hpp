#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace epictrl {

inline constexpr std::string_view kToolkitVersion = "1.0.0";

struct ManifestEntry {
    std::string path; // relative to the output directory
    std::string checksum;
    std::uintmax_t bytes = 0;
};

/// Record of one command invocation: enough to rerun it and check the outputs.
struct RunManifest {
    std::string command;
    nlohmann::json options = nlohmann::json::object();
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    std::vector<ManifestEntry> outputs;

    /// Checksums the file now; path is stored relative to out_dir.
    void add_output(const std::filesystem::path& out_dir, const std::filesystem::path& file);

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& doc);

    /// Stamps finished_at and writes atomically.
    void write(const std::filesystem::path& path);
};

/// Current UTC time, ISO-8601 to the second.
std::string utc_timestamp();

} // namespace epictrl
