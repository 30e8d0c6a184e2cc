#include "epictrl/manifest.hpp"

#include <chrono>
#include <ctime>

#include "epictrl/checksum.hpp"
#include "epictrl/csv.hpp"
#include "epictrl/errors.hpp"

namespace epictrl {

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void RunManifest::add_output(const std::filesystem::path& out_dir,
                             const std::filesystem::path& file)
{
    std::error_code ec;
    const auto size = std::filesystem::file_size(file, ec);
    if (ec)
        throw IoError("cannot stat " + file.string());
    outputs.push_back({std::filesystem::relative(file, out_dir).generic_string(),
                       to_hex(file_checksum(file)), size});
}

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json files = nlohmann::json::array();
    for (const auto& o : outputs)
        files.push_back({{"path", o.path}, {"fnv1a64", o.checksum}, {"bytes", o.bytes}});
    return {{"toolkit_version", kToolkitVersion},
            {"csv_format_version", kCsvFormatVersion},
            {"command", command},
            {"options", options},
            {"seed", seed},
            {"started_at", started_at},
            {"finished_at", finished_at},
            {"config", config},
            {"outputs", files}};
}

RunManifest RunManifest::from_json(const nlohmann::json& doc)
{
    RunManifest m;
    try {
        m.command = doc.at("command").get<std::string>();
        m.options = doc.at("options");
        m.config = doc.at("config");
        m.seed = doc.at("seed").get<std::uint64_t>();
        m.started_at = doc.at("started_at").get<std::string>();
        m.finished_at = doc.at("finished_at").get<std::string>();
        for (const auto& f : doc.at("outputs"))
            m.outputs.push_back({f.at("path").get<std::string>(),
                                 f.at("fnv1a64").get<std::string>(),
                                 f.at("bytes").get<std::uintmax_t>()});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("malformed run manifest: ") + e.what());
    }
    return m;
}

void RunManifest::write(const std::filesystem::path& path)
{
    finished_at = utc_timestamp();
    write_file(path, to_json().dump(2) + "\n");
}

} // namespace epictrl
