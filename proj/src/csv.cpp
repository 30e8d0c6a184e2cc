#include "epictrl/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <system_error>

#include "epictrl/errors.hpp"

namespace epictrl {

namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

std::string_view strip_cr(std::string_view s)
{
    if (!s.empty() && s.back() == '\r')
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, std::size_t line)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw SchemaMismatch("line " + std::to_string(line) + ": '" + std::string(field) +
                             "' is not a number");
    return v;
}

int parse_int(std::string_view field, std::size_t line)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw SchemaMismatch("line " + std::to_string(line) + ": '" + std::string(field) +
                             "' is not an integer");
    return v;
}

Restriction parse_action(std::string_view field, std::size_t line)
{
    const int c = parse_int(field, line);
    if (c < 0 || c >= static_cast<int>(kRestrictionCount))
        throw SchemaMismatch("line " + std::to_string(line) + ": action " + std::to_string(c) +
                             " is not a restriction code");
    return static_cast<Restriction>(c);
}

// Reads the header and returns the data rows split into fields.
std::vector<std::vector<std::string>> read_rows(std::istream& in, std::string_view header,
                                                std::string_view what)
{
    std::string line;
    if (!std::getline(in, line))
        throw SchemaMismatch(std::string(what) + " CSV is empty");
    if (strip_cr(line) != header)
        throw SchemaMismatch(std::string(what) + " CSV header must be '" + std::string(header) +
                             "', got '" + std::string(strip_cr(line)) + "'");
    const std::size_t columns = split(header).size();
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto trimmed = strip_cr(line);
        if (trimmed.empty())
            continue;
        const auto fields = split(trimmed);
        if (fields.size() != columns)
            throw SchemaMismatch("line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(columns) + " fields, got " +
                                 std::to_string(fields.size()));
        rows.emplace_back(fields.begin(), fields.end());
    }
    return rows;
}

std::string optional_number(const std::optional<double>& v)
{
    return v ? format_number(*v) : std::string();
}

std::string optional_int(const std::optional<int>& v)
{
    return v ? std::to_string(*v) : std::string();
}

} // namespace

std::string format_number(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double N)
{
    out << kTrajectoryHeader << '\n';
    for (const auto& rec : traj.days) {
        const auto& c = rec.state;
        out << rec.day << ',' << format_number(c.s) << ',' << format_number(c.e) << ','
            << format_number(c.i) << ',' << format_number(c.r) << ',' << format_number(c.d) << ','
            << format_number(rec.economy) << ',' << format_number(rec.economy / N) << ','
            << code(rec.restriction) << ',' << optional_number(rec.reward) << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in)
{
    const auto rows = read_rows(in, kTrajectoryHeader, "trajectory");
    if (rows.empty())
        throw SchemaMismatch("trajectory CSV has no rows");
    Trajectory traj;
    std::size_t lineno = 1;
    for (const auto& f : rows) {
        ++lineno;
        DayRecord rec;
        rec.day = parse_int(f[0], lineno);
        if (rec.day != static_cast<int>(traj.days.size()))
            throw SchemaMismatch("line " + std::to_string(lineno) + ": day " +
                                 std::to_string(rec.day) + " breaks the contiguous sequence");
        rec.state = {parse_double(f[1], lineno), parse_double(f[2], lineno),
                     parse_double(f[3], lineno), parse_double(f[4], lineno),
                     parse_double(f[5], lineno)};
        rec.economy = parse_double(f[6], lineno);
        rec.restriction = parse_action(f[8], lineno);
        if (!f[9].empty())
            rec.reward = parse_double(f[9], lineno);
        traj.days.push_back(rec);
    }
    return traj;
}

void write_training_csv(std::ostream& out, const std::vector<EpisodeLog>& logs)
{
    out << kTrainingHeader << '\n';
    for (const auto& log : logs)
        out << log.episode << ',' << log.length_days << ',' << format_number(log.mean_reward)
            << ',' << format_number(log.peak_reward) << ',' << format_number(log.epsilon) << ','
            << format_number(log.final_state.d) << '\n';
}

void write_schedule_csv(std::ostream& out, const std::vector<Restriction>& schedule)
{
    out << kScheduleHeader << '\n';
    for (std::size_t d = 0; d < schedule.size(); ++d)
        out << d << ',' << code(schedule[d]) << '\n';
}

std::vector<Restriction> read_schedule_csv(std::istream& in)
{
    const auto rows = read_rows(in, kScheduleHeader, "schedule");
    std::vector<Restriction> schedule;
    std::size_t lineno = 1;
    for (const auto& f : rows) {
        ++lineno;
        if (parse_int(f[0], lineno) != static_cast<int>(schedule.size()))
            throw SchemaMismatch("line " + std::to_string(lineno) +
                                 ": schedule days must be contiguous from 0");
        schedule.push_back(parse_action(f[1], lineno));
    }
    if (schedule.empty())
        throw SchemaMismatch("schedule CSV has no rows");
    return schedule;
}

std::vector<Restriction> schedule_from_trajectory(const Trajectory& traj)
{
    std::vector<Restriction> out;
    for (std::size_t k = 1; k < traj.days.size(); ++k)
        out.push_back(traj.days[k].restriction);
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows)
{
    out << kSummaryHeader << '\n';
    for (const auto& row : rows) {
        const auto& s = row.summary;
        std::optional<double> at_crossing;
        if (s.economy_at_crossing)
            at_crossing = *s.economy_at_crossing * 100.0;
        out << row.policy << ',' << optional_int(s.crossing_cumulative) << ','
            << optional_int(s.crossing_current) << ',' << format_number(s.mean_economy_norm * 100.0)
            << ',' << format_number(s.final_economy_norm * 100.0) << ','
            << optional_number(at_crossing) << ',' << format_number(s.total_deaths) << ','
            << s.length_days << ',' << optional_number(s.reward_mean) << ','
            << optional_number(s.reward_peak) << ',' << optional_number(s.reward_total) << '\n';
    }
}

void write_file(const std::filesystem::path& path, std::string_view contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write " + path.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out)
            throw IoError("failed writing " + path.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace epictrl
