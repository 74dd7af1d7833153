#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerosurvey/spatial.hpp"
#include "aerosurvey/uncertainty.hpp"

namespace aerosurvey {

enum class PlannerKind { min_cost, grid, spiral, random };
enum class ShortestPathEngine { dijkstra, bellman_ford };

/// Floor on the uncertainty line integral of an edge before taking its reciprocal.
inline constexpr double kMinEdgeIntegral = 1e-6;

std::string_view to_string(PlannerKind kind);
PlannerKind parse_planner(std::string_view name);

struct PlanRequest {
    Waypoint current_position;
    const UncertaintyField& uncertainty;
    const MotionGraph& graph;
    std::mt19937_64& rng;
};

/// Argmax of the 3x3 box-filtered uncertainty; lowest index wins ties.
/// `exclude` removes one candidate (the UAV's own grid point).
std::size_t pick_destination(const UncertaintyField& uncertainty, const GridSpec& grid,
                             std::optional<std::size_t> exclude = std::nullopt);

/// Reciprocal of the trapezoidal uncertainty integral along the edge.
double edge_weight(const GridSpec& grid, std::span<const double> u, std::size_t from, std::size_t to);

/// Node sequence of a least-cost walk from source to target.
std::vector<std::size_t> shortest_path(const MotionGraph& graph, std::span<const double> u, std::size_t source,
                                       std::size_t target,
                                       ShortestPathEngine engine = ShortestPathEngine::dijkstra);

double path_cost(const MotionGraph& graph, std::span<const double> u, std::span<const std::size_t> nodes);

std::vector<Waypoint> min_cost_route(const PlanRequest& request, std::size_t destination,
                                     ShortestPathEngine engine = ShortestPathEngine::dijkstra);

/// Boustrophedon sweep: row 0 left to right, row 1 right to left, ...
std::vector<Waypoint> grid_route(const GridSpec& grid);

/// Inward rectangular spiral from (0, 0): +x, +y, -x, -y, then the next ring.
std::vector<Waypoint> spiral_route(const GridSpec& grid);

/// [current, uniformly drawn grid point], flown in a straight line.
std::vector<Waypoint> random_route(const PlanRequest& request);
std::vector<Waypoint> random_route(const GridSpec& grid, Waypoint current, std::mt19937_64& rng);

/// The route the given planner flies next from request.current_position.
/// Always starts at the current position.
std::vector<Waypoint> plan_route(PlannerKind kind, const PlanRequest& request,
                                 ShortestPathEngine engine = ShortestPathEngine::dijkstra);

}  // namespace aerosurvey
