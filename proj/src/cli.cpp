#include "aerosurvey/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aerosurvey/config.hpp"
#include "aerosurvey/harness.hpp"
#include "aerosurvey/output.hpp"

namespace aerosurvey {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<std::size_t> parse_snapshots(const std::string& list) {
    std::vector<std::size_t> out;
    for (const auto& item : split(list)) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.front() == '-') throw ConfigError("--snapshots: bad index '" + item + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

SurveyConfig config_from(const std::string& path) {
    return path.empty() ? parse_config("{}") : load_config(path);
}

template <class F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

void write_both(std::span<const double> values, const GridSpec& grid, const fs::path& stem, std::string_view comment) {
    write_grid(values, grid, fs::path(stem).concat(".csv"), GridFormat::csv, comment);
    write_grid(values, grid, fs::path(stem).concat(".pgm"), GridFormat::pgm);
}

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

int cmd_survey(const SurveyArgs& args) {
    return guarded([&] {
        SurveyConfig config = config_from(args.config_path);
        if (args.seed) config.seed = *args.seed;
        if (args.planner) {
            try {
                config.planner = parse_planner(*args.planner);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("--planner: ") + e.what());
            }
        }
        SurveyOptions options;
        options.snapshots = parse_snapshots(args.snapshots);

        const SurveyRecord record = run_survey(config, options);

        const fs::path dir(args.out_dir);
        fs::create_directories(dir);
        const auto& grid = config.grid;
        write_file_atomic(dir / "metrics.csv", format_metrics(record.metrics));
        write_file_atomic(dir / "trajectory.csv", format_trajectory(record.measurements));
        std::string txs = "k,x,y,z,power_dbm\n";
        for (std::size_t k = 0; k < record.transmitters.size(); ++k) {
            const auto& tx = record.transmitters[k];
            std::ostringstream line;
            line.precision(10);
            line << k << ',' << tx.position.x << ',' << tx.position.y << ',' << tx.position.z << ',' << tx.power_dbm
                 << '\n';
            txs += line.str();
        }
        write_file_atomic(dir / "transmitters.csv", txs);
        for (std::size_t k = 0; k < record.transmitters.size(); ++k)
            write_both(as_span(record.truth.grid_power(k)), grid, dir / ("true_power_tx" + std::to_string(k)),
                       "true power, dBm");
        for (const auto& snap : record.snapshots) {
            const std::string prefix = "snapshot_t" + std::to_string(snap.t) + "_";
            for (std::size_t k = 0; k < snap.mean.size(); ++k) {
                const std::string tx = "_tx" + std::to_string(k);
                write_both(as_span(snap.mean[k]), grid, dir / (prefix + "mean" + tx), "posterior mean power, dBm");
                write_both(snap.service_prob[k], grid, dir / (prefix + "service_prob" + tx), "service probability");
            }
            write_both(snap.power.values, grid, dir / (prefix + "unc_power"), "power uncertainty (variance / prior variance)");
            write_both(snap.service.values, grid, dir / (prefix + "unc_service"), "service uncertainty, bits");
        }
        return kExitOk;
    });
}

int cmd_montecarlo(const MonteCarloArgs& args) {
    return guarded([&] {
        SurveyConfig config = config_from(args.config_path);
        if (args.seed) config.seed = *args.seed;
        if (args.runs == 0) throw ConfigError("--runs must be >= 1");
        std::vector<PlannerKind> planners;
        for (const auto& name : split(args.planners)) {
            try {
                planners.push_back(parse_planner(name));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("--planners: ") + e.what());
            }
        }
        if (planners.empty()) throw ConfigError("--planners: empty list");
        if (!config.stop.max_measurements) throw ConfigError("stop.max_measurements is required for montecarlo");

        const GridPrior prior(config.grid, config.channel);
        std::vector<std::pair<PlannerKind, std::string>> outputs;
        for (PlannerKind kind : planners) {
            config.planner = kind;
            const auto result = monte_carlo(config, prior, args.runs);
            outputs.emplace_back(kind, format_montecarlo(result.rows));
        }
        const fs::path dir(args.out_dir);
        fs::create_directories(dir);
        for (const auto& [kind, csv] : outputs)
            write_file_atomic(dir / ("montecarlo_" + std::string(to_string(kind)) + ".csv"), csv);
        return kExitOk;
    });
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Autonomous aerial spectrum surveying simulator"};
    app.require_subcommand(1);

    SurveyArgs survey;
    std::uint64_t survey_seed = 0;
    std::string survey_planner;
    auto* s = app.add_subcommand("survey", "Fly one survey and write metrics, trajectory and map grids");
    s->add_option("--config", survey.config_path, "JSON configuration file");
    auto* s_seed = s->add_option("--seed", survey_seed, "Seed (overrides the config)");
    auto* s_planner = s->add_option("--planner", survey_planner, "min_cost | grid | spiral | random");
    s->add_option("--out-dir", survey.out_dir, "Output directory");
    s->add_option("--snapshots", survey.snapshots, "Comma-separated measurement indices to dump map grids at");

    MonteCarloArgs mc;
    std::uint64_t mc_seed = 0;
    auto* m = app.add_subcommand("montecarlo", "Average survey metrics over independent realizations");
    m->add_option("--config", mc.config_path, "JSON configuration file");
    m->add_option("--runs", mc.runs, "Number of realizations");
    m->add_option("--planners", mc.planners, "Comma-separated planner list");
    auto* m_seed = m->add_option("--seed", mc_seed, "Seed (overrides the config)");
    m->add_option("--out-dir", mc.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    if (s->parsed()) {
        if (*s_seed) survey.seed = survey_seed;
        if (*s_planner) survey.planner = survey_planner;
        return cmd_survey(survey);
    }
    if (*m_seed) mc.seed = mc_seed;
    return cmd_montecarlo(mc);
}

}  // namespace aerosurvey
