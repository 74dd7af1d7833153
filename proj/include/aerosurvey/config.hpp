#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "aerosurvey/harness.hpp"

namespace aerosurvey {

/// Malformed or invalid configuration. The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a JSON survey configuration. Omitted fields take the default
/// scenario (30x25 grid at 10 m, two random 10 dBm transmitters at 10 m
/// height, 2.4 GHz, 9 dB^2 shadowing with 50 m correlation distance, no
/// fading or noise, r_min 5 dBm, a measurement every 5 m).
SurveyConfig parse_config(std::string_view json_text);

SurveyConfig load_config(const std::filesystem::path& path);

Aggregation parse_aggregation(std::string_view name);
MapKind parse_map_kind(std::string_view name);
ShortestPathEngine parse_engine(std::string_view name);

}  // namespace aerosurvey
