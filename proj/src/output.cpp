#include "aerosurvey/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace aerosurvey {

namespace {

std::string fmt_num(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot move '" + tmp.string() + "' into place: " + ec.message());
    }
}

std::string format_grid(std::span<const double> values, const GridSpec& grid, GridFormat format,
                        std::string_view comment) {
    if (values.size() != grid.size()) throw std::invalid_argument("format_grid: value count differs from grid size");
    std::string out;
    if (format == GridFormat::csv) {
        if (!comment.empty()) {
            out += "# ";
            out += comment;
            out += '\n';
        }
        for (std::size_t r = 0; r < grid.rows; ++r) {
            for (std::size_t c = 0; c < grid.cols; ++c) {
                if (c) out += ',';
                out += fmt_num(values[r * grid.cols + c], 6);
            }
            out += '\n';
        }
        return out;
    }

    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double min = *lo;
    const double range = *hi - *lo;
    out += "P2\n" + std::to_string(grid.cols) + " " + std::to_string(grid.rows) + "\n255\n";
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const double v = values[r * grid.cols + c];
            const long level = range > 0.0 ? std::lround(255.0 * (v - min) / range) : 0;
            if (c) out += ' ';
            out += std::to_string(level);
        }
        out += '\n';
    }
    return out;
}

void write_grid(std::span<const double> values, const GridSpec& grid, const std::filesystem::path& path,
                GridFormat format, std::string_view comment) {
    write_file_atomic(path, format_grid(values, grid, format, comment));
}

std::vector<double> read_grid_csv(const std::filesystem::path& path, std::size_t& rows, std::size_t& cols) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::vector<double> values;
    rows = 0;
    cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t n = 0;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
            ++n;
        }
        if (rows == 0) cols = n;
        else if (n != cols) throw std::runtime_error("ragged grid csv '" + path.string() + "'");
        ++rows;
    }
    return values;
}

std::string format_metrics(std::span<const MetricsRow> rows) {
    std::string out(kMetricsHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.run) + "," + std::to_string(r.t) + "," + fmt_num(r.meters, 10) + "," +
               fmt_num(r.total_unc_power, 10) + "," + fmt_num(r.total_unc_service, 10) + "," +
               fmt_num(r.service_error_rate, 10) + "\n";
    }
    return out;
}

std::string format_trajectory(std::span<const Measurement> measurements) {
    std::string out = "t,x,y\n";
    for (std::size_t t = 0; t < measurements.size(); ++t) {
        const auto& p = measurements[t].position;
        out += std::to_string(t) + "," + fmt_num(p.x, 10) + "," + fmt_num(p.y, 10) + "\n";
    }
    return out;
}

std::string format_montecarlo(std::span<const MonteCarloRow> rows) {
    std::string out =
        "t,mean_meters,std_meters,mean_total_unc_power,std_total_unc_power,mean_total_unc_service,"
        "std_total_unc_service,mean_service_error_rate,std_service_error_rate\n";
    for (const auto& r : rows) {
        out += std::to_string(r.t);
        for (const MetricStats* s : {&r.meters, &r.total_unc_power, &r.total_unc_service, &r.service_error_rate})
            out += "," + fmt_num(s->mean, 10) + "," + fmt_num(s->std, 10);
        out += '\n';
    }
    return out;
}

}  // namespace aerosurvey
