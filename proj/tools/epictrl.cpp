// Command-line front end for the epidemic-control toolkit.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "epictrl/commands.hpp"
#include "epictrl/config.hpp"
#include "epictrl/errors.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kRuntimeError = 3,
    kIoError = 4,
};

} // namespace

int main(int argc, char** argv)
{
    using namespace epictrl;

    CLI::App app{"Epidemic restriction policies: SEIRD simulation and double deep Q-learning"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string preset;
    std::string effects_path;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Run seed");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--preset", preset, "Reward preset: default, balanced, economy_biased");
    app.add_option("--effects", effects_path,
                   "JSON overlay with a restrictions section (e.g. calibration output)")
        ->check(CLI::ExistingFile);

    auto* simulate = app.add_subcommand("simulate", "Constant or scheduled restriction run");
    std::optional<int> restriction_code;
    std::string schedule_path;
    std::string sim_name;
    auto* restriction_opt =
        simulate->add_option("--restriction", restriction_code, "Restriction code 0-3")
            ->check(CLI::Range(0, 3));
    simulate->add_option("--schedule", schedule_path, "CSV with day,action rows")
        ->check(CLI::ExistingFile)
        ->excludes(restriction_opt);
    simulate->add_option("--name", sim_name, "Output file stem");

    auto* calibrate = app.add_subcommand("calibrate", "Fit transmission multipliers to crossing days");
    std::vector<int> targets = {50, 80, 150, 300};
    int tolerance = 2;
    calibrate->add_option("--targets", targets, "Crossing day per restriction (4 values)")
        ->expected(4)
        ->delimiter(',');
    calibrate->add_option("--tolerance", tolerance, "Accepted distance in days");

    auto* train_cmd = app.add_subcommand("train", "Train a double deep Q-network agent");
    std::optional<int> episodes;
    std::string train_name = "train";
    train_cmd->add_option("--episodes", episodes, "Training episodes");
    train_cmd->add_option("--name", train_name, "Output file stem");

    auto* evaluate = app.add_subcommand("evaluate", "Greedy rollout of a trained agent");
    std::string weights_path;
    std::string eval_name = "evaluate";
    evaluate->add_option("--weights", weights_path, "Weight archive")->required();
    evaluate->add_option("--name", eval_name, "Output file stem");

    auto* compare = app.add_subcommand("compare", "Summary table over trajectory CSVs");
    std::vector<std::string> inputs;
    bool baselines = false;
    compare->add_option("inputs", inputs, "Trajectory CSV files");
    compare->add_flag("--baselines", baselines, "Include the four constant-restriction runs");

    auto* steer = app.add_subcommand("steer", "Interactive day-by-day session");
    std::string steer_weights;
    std::string steer_name = "steer";
    steer->add_option("--weights", steer_weights, "Agent used by 'auto N'");
    steer->add_option("--name", steer_name, "Output file stem");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        ToolkitConfig cfg = config_path.empty() ? ToolkitConfig{} : ToolkitConfig::load(config_path);
        if (!effects_path.empty()) {
            std::ifstream in(effects_path);
            if (!in)
                throw IoError("cannot read " + effects_path);
            nlohmann::json overlay;
            try {
                overlay = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigInvalid(effects_path + " is not valid JSON: " + e.what());
            }
            cfg.merge(overlay);
        }
        if (seed)
            cfg.seed = *seed;
        if (!out_dir.empty())
            cfg.output_dir = out_dir;
        if (!preset.empty())
            cfg.set_reward_preset(preset);
        if (episodes)
            cfg.train.episodes = *episodes;
        cfg.validate();

        if (*simulate) {
            SimulateOptions opts;
            if (restriction_code)
                opts.restriction = restriction_from_code(*restriction_code);
            if (!schedule_path.empty())
                opts.schedule = schedule_path;
            opts.name = sim_name;
            run_simulate(cfg, opts, std::cout);
        } else if (*calibrate) {
            if (targets.size() != kRestrictionCount)
                throw ConfigInvalid("--targets needs exactly four days");
            CalibrationTargets t;
            std::copy(targets.begin(), targets.end(), t.days.begin());
            t.tolerance_days = tolerance;
            run_calibrate(cfg, t, std::cout);
        } else if (*train_cmd) {
            run_train(cfg, std::cout, train_name);
        } else if (*evaluate) {
            run_evaluate(cfg, weights_path, std::cout, eval_name);
        } else if (*compare) {
            std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
            run_compare(cfg, paths, baselines, std::cout);
        } else if (*steer) {
            SteerOptions opts;
            if (!steer_weights.empty())
                opts.weights = steer_weights;
            opts.name = steer_name;
            run_steer(cfg, opts, std::cin, std::cout);
        }
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kIoError;
    } catch (const SchemaMismatch& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
