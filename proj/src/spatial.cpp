#include "aerosurvey/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace aerosurvey {

namespace {
constexpr double kArcTolerance = 1e-9;
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void GridSpec::validate() const {
    if (rows == 0) throw std::invalid_argument("grid.rows must be positive");
    if (cols == 0) throw std::invalid_argument("grid.cols must be positive");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("grid.spacing must be > 0");
    if (!(altitude >= 0.0) || !std::isfinite(altitude))
        throw std::invalid_argument("grid.altitude must be >= 0");
}

bool GridSpec::contains(Point2 p, double tol) const {
    return p.x >= origin.x - tol && p.x <= origin.x + width() + tol && p.y >= origin.y - tol &&
           p.y <= origin.y + height() + tol;
}

Point2 index_to_point(const GridSpec& grid, std::size_t g) {
    if (g >= grid.size())
        throw std::out_of_range("grid index " + std::to_string(g) + " out of range");
    const auto row = g / grid.cols;
    const auto col = g % grid.cols;
    return {grid.origin.x + static_cast<double>(col) * grid.spacing,
            grid.origin.y + static_cast<double>(row) * grid.spacing};
}

std::size_t point_to_index(const GridSpec& grid, std::size_t row, std::size_t col) {
    if (row >= grid.rows || col >= grid.cols) throw std::out_of_range("grid cell out of range");
    return row * grid.cols + col;
}

std::size_t nearest_index(const GridSpec& grid, Point2 p) {
    auto snap = [&](double v, std::size_t n) {
        const double k = std::round(v / grid.spacing);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(n - 1)));
    };
    return snap(p.y - grid.origin.y, grid.rows) * grid.cols + snap(p.x - grid.origin.x, grid.cols);
}

bool on_grid_point(const GridSpec& grid, Point2 p, std::size_t& index, double tol) {
    const auto g = nearest_index(grid, p);
    if (distance(index_to_point(grid, g), p) > tol) return false;
    index = g;
    return true;
}

MotionGraph::MotionGraph(const GridSpec& grid) : grid_(grid), adjacency_(grid.size()) {
    if (grid.rows < 2 || grid.cols < 2)
        throw std::invalid_argument("motion graph needs at least 2 rows and 2 columns");
    const auto rows = static_cast<long>(grid.rows);
    const auto cols = static_cast<long>(grid.cols);
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) {
            auto& adj = adjacency_[static_cast<std::size_t>(r * cols + c)];
            adj.reserve(8);
            for (long dr = -1; dr <= 1; ++dr) {
                for (long dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const long nr = r + dr;
                    const long nc = c + dc;
                    if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
                    adj.push_back(static_cast<std::size_t>(nr * cols + nc));
                }
            }
        }
    }
}

MotionGraph build_motion_graph(const GridSpec& grid) { return MotionGraph(grid); }

PathSampler::PathSampler(double delta) : delta_(delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("sample spacing must be > 0");
}

void PathSampler::feed(std::span<const Waypoint> polyline, std::vector<Point2>& out) {
    if (polyline.empty()) return;
    if (next_ <= 0.0) {
        out.push_back(polyline.front());
        next_ = delta_;
    }
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        const Point2 a = polyline[i - 1];
        const Point2 b = polyline[i];
        const double len = distance(a, b);
        if (len == 0.0) continue;
        while (next_ <= len + kArcTolerance) {
            const double s = std::min(next_ / len, 1.0);
            out.push_back({a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s});
            next_ += delta_;
        }
        next_ -= len;
    }
}

std::vector<Point2> sample_path(std::span<const Waypoint> waypoints, double delta) {
    PathSampler sampler(delta);
    std::vector<Point2> out;
    sampler.feed(waypoints, out);
    return out;
}

double path_length(std::span<const Waypoint> waypoints) {
    double total = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) total += distance(waypoints[i - 1], waypoints[i]);
    return total;
}

double travel_time(std::span<const Waypoint> waypoints, double speed) {
    if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
    return path_length(waypoints) / speed;
}

}  // namespace aerosurvey
