#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aerosurvey {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// A position the UAV flies through.
using Waypoint = Point2;

double distance(Point2 a, Point2 b);

/**
 * Rectangular planning grid at a fixed flight altitude.
 *
 * Grid points are indexed row-major, g = row * cols + col, with row 0 at the
 * minimum y coordinate and col 0 at the minimum x coordinate.
 */
struct GridSpec {
    std::size_t rows = 30;
    std::size_t cols = 25;
    double spacing = 10.0;
    Point2 origin{};
    double altitude = 20.0;

    std::size_t size() const { return rows * cols; }
    double width() const { return static_cast<double>(cols - 1) * spacing; }
    double height() const { return static_cast<double>(rows - 1) * spacing; }

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
    bool contains(Point2 p, double tol = 1e-9) const;
};

Point2 index_to_point(const GridSpec& grid, std::size_t g);
std::size_t point_to_index(const GridSpec& grid, std::size_t row, std::size_t col);

/// Index of the grid point nearest to p (p is clamped into the grid first).
std::size_t nearest_index(const GridSpec& grid, Point2 p);

/// Grid point index when p coincides with one within tol meters.
bool on_grid_point(const GridSpec& grid, Point2 p, std::size_t& index, double tol = 1e-6);

/// 8-connected (king move) neighbourhood of every grid point.
class MotionGraph {
public:
    explicit MotionGraph(const GridSpec& grid);

    std::span<const std::size_t> neighbors(std::size_t g) const { return adjacency_[g]; }
    std::size_t size() const { return adjacency_.size(); }
    const GridSpec& grid() const { return grid_; }

private:
    GridSpec grid_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

MotionGraph build_motion_graph(const GridSpec& grid);

/**
 * Emits points at constant arc-length spacing along a sequence of polylines.
 *
 * The distance to the next sample is carried across segment joints and
 * across successive calls to feed(), so samples along a piecewise
 * trajectory are exactly `delta` apart regardless of how it is split.
 */
class PathSampler {
public:
    explicit PathSampler(double delta);

    /// Appends the samples on the polyline to out. The first waypoint is
    /// where the previous polyline ended (or the start of the trajectory).
    void feed(std::span<const Waypoint> polyline, std::vector<Point2>& out);

    /// Arc length still to travel before the next sample.
    double pending() const { return next_; }

private:
    double delta_;
    double next_ = 0.0;
};

std::vector<Point2> sample_path(std::span<const Waypoint> waypoints, double delta);

double path_length(std::span<const Waypoint> waypoints);
double travel_time(std::span<const Waypoint> waypoints, double speed);

}  // namespace aerosurvey
