#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerosurvey/harness.hpp"
#include "aerosurvey/spatial.hpp"

namespace aerosurvey {

enum class GridFormat { csv, pgm };

inline constexpr std::string_view kMetricsHeader = "run,t,meters,total_unc_power,total_unc_service,service_error_rate";

/// Writes content to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// csv: rows x cols matrix, row 0 first, 6 significant digits, optional
/// leading "# comment" line. pgm: plain P2, linearly scaled to 0..255.
std::string format_grid(std::span<const double> values, const GridSpec& grid, GridFormat format,
                        std::string_view comment = {});

void write_grid(std::span<const double> values, const GridSpec& grid, const std::filesystem::path& path,
                GridFormat format, std::string_view comment = {});

/// Reads a grid csv written by write_grid; '#' lines are skipped.
std::vector<double> read_grid_csv(const std::filesystem::path& path, std::size_t& rows, std::size_t& cols);

std::string format_metrics(std::span<const MetricsRow> rows);
std::string format_trajectory(std::span<const Measurement> measurements);
std::string format_montecarlo(std::span<const MonteCarloRow> rows);

}  // namespace aerosurvey
