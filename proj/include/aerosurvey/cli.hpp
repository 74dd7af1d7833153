#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aerosurvey {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

struct SurveyArgs {
    std::string config_path;  // empty: default scenario
    std::optional<std::uint64_t> seed;
    std::optional<std::string> planner;
    std::string out_dir = ".";
    std::string snapshots;  // comma-separated measurement indices
};

struct MonteCarloArgs {
    std::string config_path;
    std::size_t runs = 50;
    std::string planners = "min_cost,grid,spiral,random";
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

int cmd_survey(const SurveyArgs& args);
int cmd_montecarlo(const MonteCarloArgs& args);

/// Parses `aerosurvey <survey|montecarlo> [flags]` and dispatches.
int run_cli(int argc, char** argv);

}  // namespace aerosurvey
