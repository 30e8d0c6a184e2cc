#include "epictrl/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "epictrl/checksum.hpp"
#include "epictrl/csv.hpp"
#include "epictrl/economy.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/manifest.hpp"
#include "epictrl/svg.hpp"
#include "epictrl/weights_io.hpp"

namespace epictrl {

namespace fs = std::filesystem;

namespace {

fs::path prepare_output_dir(const ToolkitConfig& cfg)
{
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

RunManifest start_manifest(const std::string& command, const ToolkitConfig& cfg)
{
    RunManifest m;
    m.command = command;
    m.config = cfg.to_json();
    m.seed = cfg.seed;
    m.started_at = utc_timestamp();
    return m;
}

void finish_manifest(RunManifest& m, const fs::path& dir, const std::string& stem,
                     std::vector<fs::path>& files)
{
    for (const auto& f : files)
        m.add_output(dir, f);
    const fs::path path = dir / (stem + ".manifest.json");
    m.write(path);
    files.push_back(path);
}

std::string trajectory_text(const Trajectory& traj, double N)
{
    std::ostringstream out;
    write_trajectory_csv(out, traj, N);
    return out.str();
}

std::string describe_day(const std::optional<int>& day)
{
    return day ? "day " + std::to_string(*day) : std::string("never");
}

std::string percent(double fraction)
{
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(1);
    out << fraction * 100.0 << '%';
    return out.str();
}

void print_summary(std::ostream& log, const TrajectorySummary& s)
{
    log << "25% crossing (cumulative i+r+d): " << describe_day(s.crossing_cumulative)
        << "; (currently infected): " << describe_day(s.crossing_current) << '\n'
        << "mean economy: " << percent(s.mean_economy_norm);
    if (s.economy_at_crossing)
        log << "; at crossing: " << percent(*s.economy_at_crossing);
    log << "; episode length: " << s.length_days << " days; deaths: " << s.total_deaths << '\n';
}

std::vector<Restriction> load_schedule(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read schedule " + path.string());
    return read_schedule_csv(in);
}

Trajectory load_trajectory(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read trajectory " + path.string());
    try {
        return read_trajectory_csv(in);
    } catch (const SchemaMismatch& e) {
        throw SchemaMismatch(path.string() + ": " + e.what());
    }
}

NetworkParams load_agent(const fs::path& path)
{
    NetworkParams weights = load_weights(path);
    const auto& sz = weights.sizes;
    if (sz.input_width != kFeatureCount || sz.seq_len != kWindowDays ||
        sz.outputs != kRestrictionCount)
        throw FormatError(path.string() + " is not a 30 x 7 -> 4 Q-network");
    return weights;
}

std::string sanitize_label(std::string label)
{
    std::replace(label.begin(), label.end(), ',', '_');
    return label;
}

} // namespace

void attach_rewards(Trajectory& traj, const ToolkitConfig& cfg)
{
    const double N = cfg.disease.N;
    for (std::size_t k = 1; k < traj.days.size(); ++k) {
        auto& rec = traj.days[k];
        rec.reward = reward(normalize(rec.state, rec.economy, N), cfg.weights);
    }
}

Trajectory simulate_constant(const ToolkitConfig& cfg, Restriction restriction)
{
    Trajectory traj =
        simulate_policy(initial_state(cfg.disease, cfg.initial_infected_fraction), cfg.disease,
                        cfg.effects, [restriction](int, const Compartments&) { return restriction; },
                        cfg.sim);
    attach_rewards(traj, cfg);
    return traj;
}

Trajectory simulate_schedule(const ToolkitConfig& cfg, const std::vector<Restriction>& schedule)
{
    if (schedule.empty())
        throw ConfigInvalid("schedule must contain at least one day");
    SimulationSettings sim = cfg.sim;
    sim.max_days = std::min(sim.max_days, static_cast<int>(schedule.size()));
    Trajectory traj = simulate_policy(
        initial_state(cfg.disease, cfg.initial_infected_fraction), cfg.disease, cfg.effects,
        [&schedule](int day, const Compartments&) { return schedule[static_cast<std::size_t>(day)]; },
        sim);
    attach_rewards(traj, cfg);
    return traj;
}

SimulateReport run_simulate(const ToolkitConfig& cfg, const SimulateOptions& opts,
                            std::ostream& log)
{
    cfg.validate();
    if (opts.restriction && opts.schedule)
        throw ConfigInvalid("simulate takes either a restriction or a schedule, not both");
    const fs::path dir = prepare_output_dir(cfg);
    RunManifest manifest = start_manifest("simulate", cfg);

    SimulateReport report;
    std::string stem = opts.name;
    if (opts.schedule) {
        report.trajectory = simulate_schedule(cfg, load_schedule(*opts.schedule));
        manifest.options = {{"schedule", opts.schedule->string()},
                            {"schedule_fnv1a64", to_hex(file_checksum(*opts.schedule))}};
        if (stem.empty())
            stem = "simulate_schedule";
    } else {
        const Restriction r = opts.restriction.value_or(Restriction::NoRestriction);
        report.trajectory = simulate_constant(cfg, r);
        manifest.options = {{"restriction", code(r)}};
        if (stem.empty())
            stem = "simulate_" + std::string(name(r));
    }
    manifest.options["name"] = stem;

    const double N = cfg.disease.N;
    report.summary = summarize(report.trajectory, N);
    report.files = {dir / (stem + ".csv"), dir / (stem + ".svg")};
    write_file(report.files[0], trajectory_text(report.trajectory, N));
    write_file(report.files[1], render_svg(trajectory_chart(report.trajectory, stem)));
    print_summary(log, report.summary);

    finish_manifest(manifest, dir, stem, report.files);
    return report;
}

CalibrationReport calibrate_effects(const ToolkitConfig& cfg, const CalibrationTargets& targets)
{
    cfg.validate();
    for (std::size_t k = 1; k < kRestrictionCount; ++k)
        if (targets.days[k] <= targets.days[k - 1])
            throw ConfigInvalid("calibration targets must increase with strictness");
    if (targets.days[0] < 1 || targets.tolerance_days < 0 || targets.max_iterations < 1)
        throw ConfigInvalid("calibration targets must be positive with a non-negative tolerance");

    CalibrationReport report;
    report.effects = cfg.effects;
    const Compartments init = initial_state(cfg.disease, cfg.initial_infected_fraction);

    for (Restriction r : kAllRestrictions) {
        const int target = targets.days[static_cast<std::size_t>(code(r))];
        auto& entry = report.entries[static_cast<std::size_t>(code(r))];
        entry.restriction = r;

        const auto crossing = [&](double multiplier) {
            EffectsTable trial = cfg.effects;
            trial[r].beta_multiplier = multiplier;
            ++entry.iterations;
            return crossing_day_cumulative(
                simulate_policy(init, cfg.disease, trial,
                                [r](int, const Compartments&) { return r; }, cfg.sim),
                cfg.disease.N);
        };
        const auto within = [&](const std::optional<int>& day) {
            return day && std::abs(*day - target) <= targets.tolerance_days;
        };
        const std::string label(name(r));

        if (target - targets.tolerance_days > cfg.sim.max_days)
            throw CalibrationInfeasible(label + ": target day " + std::to_string(target) +
                                        " lies beyond max_days " +
                                        std::to_string(cfg.sim.max_days));

        std::optional<int> day = crossing(1.0);
        double multiplier = 1.0;
        if (!within(day)) {
            if (!day || *day > target)
                throw CalibrationInfeasible(label + ": even unrestricted transmission crosses at " +
                                            describe_day(day) + ", after target day " +
                                            std::to_string(target));
            double lo = 0.0;
            double hi = 1.0;
            bool found = false;
            for (int it = 0; it < targets.max_iterations; ++it) {
                multiplier = 0.5 * (lo + hi);
                day = crossing(multiplier);
                if (within(day)) {
                    found = true;
                    break;
                }
                if (!day || *day > target)
                    lo = multiplier;
                else
                    hi = multiplier;
            }
            if (!found)
                throw CalibrationInfeasible(label + ": no multiplier in (0, 1] crosses within " +
                                            std::to_string(targets.tolerance_days) +
                                            " days of day " + std::to_string(target));
        }
        entry.multiplier = multiplier;
        entry.crossing_day = day;
        report.effects[r].beta_multiplier = multiplier;
    }

    try {
        report.effects.validate();
    } catch (const ConfigInvalid& e) {
        throw CalibrationInfeasible(std::string("calibrated table is not monotone: ") + e.what());
    }
    return report;
}

CalibrationReport run_calibrate(const ToolkitConfig& cfg, const CalibrationTargets& targets,
                                std::ostream& log, const std::string& name)
{
    const fs::path dir = prepare_output_dir(cfg);
    RunManifest manifest = start_manifest("calibrate", cfg);
    manifest.options = {{"targets", targets.days},
                        {"tolerance_days", targets.tolerance_days},
                        {"max_iterations", targets.max_iterations},
                        {"name", name}};

    CalibrationReport report = calibrate_effects(cfg, targets);
    for (const auto& e : report.entries)
        log << std::string(epictrl::name(e.restriction)) << ": beta_multiplier "
            << format_number(e.multiplier) << " crosses on " << describe_day(e.crossing_day)
            << " (" << e.iterations << " simulations)\n";

    const nlohmann::json doc = {{"restrictions", effects_to_json(report.effects)}};
    report.files = {dir / (name + ".json")};
    write_file(report.files[0], doc.dump(2) + "\n");
    finish_manifest(manifest, dir, name, report.files);
    return report;
}

TrainReport run_train(const ToolkitConfig& cfg, std::ostream& log, const std::string& name)
{
    cfg.validate();
    const fs::path dir = prepare_output_dir(cfg);
    RunManifest manifest = start_manifest("train", cfg);
    manifest.options = {{"name", name}};

    TrainReport report;
    const std::vector<fs::path> outputs = {dir / (name + "_weights.bin"),
                                           dir / (name + "_episodes.csv"),
                                           dir / (name + "_reward.svg")};
    try {
        TrainHooks hooks;
        hooks.on_episode = [&log](const EpisodeLog& e) {
            log << "episode " << e.episode << ": " << e.length_days << " days, mean reward "
                << format_number(e.mean_reward) << ", epsilon " << format_number(e.epsilon)
                << '\n';
        };
        report.result = train(cfg.env_config(), cfg.train_config(), hooks);

        save_weights(report.result.weights, outputs[0]);
        std::ostringstream csv;
        write_training_csv(csv, report.result.episodes);
        write_file(outputs[1], csv.str());

        LineChart chart;
        chart.title = name + " reward per episode";
        chart.x_label = "episode";
        chart.y_label = "reward";
        chart.series = {{"mean reward", "#1f77b4", {}}, {"peak reward", "#ff7f0e", {}}};
        for (const auto& e : report.result.episodes) {
            chart.x.push_back(e.episode);
            chart.series[0].values.push_back(e.mean_reward);
            chart.series[1].values.push_back(e.peak_reward);
        }
        write_file(outputs[2], render_svg(chart));

        report.files = outputs;
        finish_manifest(manifest, dir, name, report.files);
    } catch (...) {
        std::error_code ec;
        for (const auto& f : outputs)
            fs::remove(f, ec);
        throw;
    }
    return report;
}

EvaluateReport run_evaluate(const ToolkitConfig& cfg, const fs::path& weights, std::ostream& log,
                            const std::string& name)
{
    cfg.validate();
    const NetworkParams agent = load_agent(weights);
    const fs::path dir = prepare_output_dir(cfg);
    RunManifest manifest = start_manifest("evaluate", cfg);
    manifest.options = {{"weights", weights.string()},
                        {"weights_fnv1a64", to_hex(file_checksum(weights))},
                        {"name", name}};

    EvaluateReport report;
    report.trajectory = greedy_rollout(agent, cfg.env_config());
    const double N = cfg.disease.N;
    report.summary = summarize(report.trajectory, N);

    report.files = {dir / (name + ".csv"), dir / (name + ".svg")};
    write_file(report.files[0], trajectory_text(report.trajectory, N));
    write_file(report.files[1], render_svg(policy_chart(report.trajectory, name)));
    print_summary(log, report.summary);

    finish_manifest(manifest, dir, name, report.files);
    return report;
}

CompareReport run_compare(const ToolkitConfig& cfg, const std::vector<fs::path>& inputs,
                          bool include_baselines, std::ostream& log, const std::string& name)
{
    cfg.validate();
    const std::size_t policies = inputs.size() + (include_baselines ? kRestrictionCount : 0);
    if (policies < 2)
        throw ConfigInvalid("compare needs at least two policies");

    const double N = cfg.disease.N;
    CompareReport report;
    nlohmann::json listed = nlohmann::json::array();
    for (const auto& path : inputs) {
        report.rows.push_back({sanitize_label(path.stem().string()),
                               summarize(load_trajectory(path), N)});
        listed.push_back({{"path", path.string()}, {"fnv1a64", to_hex(file_checksum(path))}});
    }
    if (include_baselines)
        for (Restriction r : kAllRestrictions)
            report.rows.push_back({"baseline_" + std::string(epictrl::name(r)),
                                   summarize(simulate_constant(cfg, r), N)});

    const fs::path dir = prepare_output_dir(cfg);
    RunManifest manifest = start_manifest("compare", cfg);
    manifest.options = {{"inputs", listed}, {"baselines", include_baselines}, {"name", name}};

    std::ostringstream csv;
    write_summary_csv(csv, report.rows);
    report.files = {dir / (name + "_summary.csv")};
    write_file(report.files[0], csv.str());
    log << csv.str();

    finish_manifest(manifest, dir, name, report.files);
    return report;
}

SteerReport run_steer(const ToolkitConfig& cfg, const SteerOptions& opts, std::istream& in,
                      std::ostream& out)
{
    cfg.validate();
    std::optional<NetworkParams> agent;
    if (opts.weights)
        agent = load_agent(*opts.weights);
    const fs::path dir = prepare_output_dir(cfg);
    RunManifest manifest = start_manifest("steer", cfg);

    EpidemicEnv env(cfg.env_config());
    const double N = cfg.disease.N;
    out << "restrictions: 0 none, 1 social distancing, 2 lockdown, 3 lockdown + curfew\n"
        << "commands: 0-3 apply for one day, 'auto N' lets the agent act, 'q' quits\n";

    while (!env.done()) {
        const auto& rec = env.trajectory().back();
        const auto& c = rec.state;
        out << "day " << rec.day << "  S " << format_number(c.s) << "  E " << format_number(c.e)
            << "  I " << format_number(c.i) << "  R " << format_number(c.r) << "  D "
            << format_number(c.d) << "  economy " << percent(rec.economy / N);
        if (rec.reward)
            out << "  reward " << format_number(*rec.reward);
        out << "\n> " << std::flush;

        std::string line;
        if (!std::getline(in, line))
            break;
        std::istringstream words(line);
        std::string cmd;
        words >> cmd;
        if (cmd == "q" || cmd == "quit")
            break;
        if (cmd.size() == 1 && cmd[0] >= '0' && cmd[0] <= '3') {
            env.step(static_cast<Restriction>(cmd[0] - '0'));
            continue;
        }
        if (cmd == "auto") {
            long days = 0;
            std::string extra;
            if (!(words >> days) || days < 1 || (words >> extra)) {
                out << "usage: auto N (N >= 1)\n";
                continue;
            }
            if (!agent) {
                out << "no agent loaded; start with --weights to use auto\n";
                continue;
            }
            for (long k = 0; k < days && !env.done(); ++k)
                env.step(greedy_action(q_values(*agent, env.observation())));
            continue;
        }
        out << "invalid input '" << line << "'\n";
    }
    if (env.done())
        out << "episode finished on day " << env.day() << '\n';

    SteerReport report;
    report.trajectory = env.trajectory();
    report.schedule = schedule_from_trajectory(report.trajectory);

    std::ostringstream schedule_csv;
    write_schedule_csv(schedule_csv, report.schedule);
    report.files = {dir / (opts.name + "_schedule.csv"), dir / (opts.name + "_trajectory.csv")};
    write_file(report.files[0], schedule_csv.str());
    write_file(report.files[1], trajectory_text(report.trajectory, N));

    manifest.options = {{"name", opts.name}, {"days", report.trajectory.size() - 1}};
    if (opts.weights)
        manifest.options["weights"] = opts.weights->string();
    finish_manifest(manifest, dir, opts.name, report.files);
    return report;
}

} // namespace epictrl
