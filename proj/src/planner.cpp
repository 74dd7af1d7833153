#include "aerosurvey/planner.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

#include "aerosurvey/kernels.hpp"

namespace aerosurvey {

std::string_view to_string(PlannerKind kind) {
    switch (kind) {
        case PlannerKind::min_cost: return "min_cost";
        case PlannerKind::grid: return "grid";
        case PlannerKind::spiral: return "spiral";
        case PlannerKind::random: return "random";
    }
    return "unknown";
}

PlannerKind parse_planner(std::string_view name) {
    if (name == "min_cost") return PlannerKind::min_cost;
    if (name == "grid") return PlannerKind::grid;
    if (name == "spiral") return PlannerKind::spiral;
    if (name == "random") return PlannerKind::random;
    throw std::invalid_argument("unknown planner '" + std::string(name) + "'");
}

std::size_t pick_destination(const UncertaintyField& uncertainty, const GridSpec& grid,
                             std::optional<std::size_t> exclude) {
    const auto& u = uncertainty.values;
    if (u.empty() || u.size() != grid.size()) throw std::invalid_argument("pick_destination: field/grid size mismatch");
    std::vector<double> filtered(u.size());
    kernels::omp::box_filter3(u, grid.rows, grid.cols, filtered);

    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < filtered.size(); ++g) {
        if (exclude && *exclude == g) continue;
        if (!best || filtered[g] > filtered[*best]) best = g;
    }
    return best.value_or(0);
}

double edge_weight(const GridSpec& grid, std::span<const double> u, std::size_t from, std::size_t to) {
    const double len = distance(index_to_point(grid, from), index_to_point(grid, to));
    const double integral = len * (u[from] + u[to]) / 2.0;
    return 1.0 / std::max(integral, kMinEdgeIntegral);
}

namespace {

std::vector<std::size_t> unwind(const std::vector<std::size_t>& parent, std::size_t source, std::size_t target) {
    std::vector<std::size_t> nodes{target};
    while (nodes.back() != source) nodes.push_back(parent[nodes.back()]);
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
}

constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> dijkstra(const MotionGraph& graph, std::span<const double> u, std::size_t source,
                                  std::size_t target) {
    const auto n = graph.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, kNoParent);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    dist[source] = 0.0;
    open.emplace(0.0, source);
    while (!open.empty()) {
        const auto [d, v] = open.top();
        open.pop();
        if (d > dist[v]) continue;
        if (v == target) break;
        for (std::size_t nb : graph.neighbors(v)) {
            const double cand = d + edge_weight(graph.grid(), u, v, nb);
            if (cand < dist[nb]) {
                dist[nb] = cand;
                parent[nb] = v;
                open.emplace(cand, nb);
            }
        }
    }
    if (parent[target] == kNoParent && target != source) throw std::runtime_error("shortest_path: unreachable destination");
    return unwind(parent, source, target);
}

std::vector<std::size_t> bellman_ford(const MotionGraph& graph, std::span<const double> u, std::size_t source,
                                      std::size_t target) {
    const auto n = graph.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> parent(n, kNoParent);
    dist[source] = 0.0;
    for (std::size_t round = 0; round + 1 < n; ++round) {
        bool changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            if (dist[v] == std::numeric_limits<double>::infinity()) continue;
            for (std::size_t nb : graph.neighbors(v)) {
                const double cand = dist[v] + edge_weight(graph.grid(), u, v, nb);
                if (cand < dist[nb]) {
                    dist[nb] = cand;
                    parent[nb] = v;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    if (parent[target] == kNoParent && target != source) throw std::runtime_error("shortest_path: unreachable destination");
    return unwind(parent, source, target);
}

}  // namespace

std::vector<std::size_t> shortest_path(const MotionGraph& graph, std::span<const double> u, std::size_t source,
                                       std::size_t target, ShortestPathEngine engine) {
    if (u.size() != graph.size()) throw std::invalid_argument("shortest_path: field/graph size mismatch");
    if (source >= graph.size() || target >= graph.size()) throw std::out_of_range("shortest_path: node out of range");
    if (source == target) return {source};
    return engine == ShortestPathEngine::dijkstra ? dijkstra(graph, u, source, target)
                                                  : bellman_ford(graph, u, source, target);
}

double path_cost(const MotionGraph& graph, std::span<const double> u, std::span<const std::size_t> nodes) {
    double cost = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) cost += edge_weight(graph.grid(), u, nodes[i - 1], nodes[i]);
    return cost;
}

std::vector<Waypoint> min_cost_route(const PlanRequest& request, std::size_t destination, ShortestPathEngine engine) {
    const auto& grid = request.graph.grid();
    const std::size_t start = nearest_index(grid, request.current_position);
    const auto nodes = shortest_path(request.graph, request.uncertainty.values, start, destination, engine);
    std::vector<Waypoint> route;
    route.reserve(nodes.size());
    for (std::size_t g : nodes) route.push_back(index_to_point(grid, g));
    return route;
}

namespace {

Waypoint cell(const GridSpec& grid, std::size_t col, std::size_t row) {
    return index_to_point(grid, point_to_index(grid, row, col));
}

void push_distinct(std::vector<Waypoint>& route, Waypoint p) {
    if (route.empty() || !(route.back() == p)) route.push_back(p);
}

}  // namespace

std::vector<Waypoint> grid_route(const GridSpec& grid) {
    std::vector<Waypoint> route;
    for (std::size_t r = 0; r < grid.rows; ++r) {
        const bool forward = r % 2 == 0;
        push_distinct(route, cell(grid, forward ? 0 : grid.cols - 1, r));
        push_distinct(route, cell(grid, forward ? grid.cols - 1 : 0, r));
    }
    return route;
}

std::vector<Waypoint> spiral_route(const GridSpec& grid) {
    std::vector<Waypoint> route;
    long left = 0;
    long right = static_cast<long>(grid.cols) - 1;
    long top = 0;
    long bottom = static_cast<long>(grid.rows) - 1;
    auto at = [&](long c, long r) { return cell(grid, static_cast<std::size_t>(c), static_cast<std::size_t>(r)); };
    while (left <= right && top <= bottom) {
        push_distinct(route, at(left, top));
        if (left == right || top == bottom) {
            push_distinct(route, at(right, bottom));
            break;
        }
        push_distinct(route, at(right, top));
        push_distinct(route, at(right, bottom));
        push_distinct(route, at(left, bottom));
        if (top + 1 < bottom) push_distinct(route, at(left, top + 1));
        ++left;
        --right;
        ++top;
        --bottom;
    }
    return route;
}

std::vector<Waypoint> random_route(const GridSpec& grid, Waypoint current, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    return {current, index_to_point(grid, pick(rng))};
}

std::vector<Waypoint> random_route(const PlanRequest& request) {
    return random_route(request.graph.grid(), request.current_position, request.rng);
}

std::vector<Waypoint> plan_route(PlannerKind kind, const PlanRequest& request, ShortestPathEngine engine) {
    const auto& grid = request.graph.grid();
    std::vector<Waypoint> route;
    switch (kind) {
        case PlannerKind::min_cost: {
            const std::size_t here = nearest_index(grid, request.current_position);
            route = min_cost_route(request, pick_destination(request.uncertainty, grid, here), engine);
            break;
        }
        case PlannerKind::grid: route = grid_route(grid); break;
        case PlannerKind::spiral: route = spiral_route(grid); break;
        case PlannerKind::random: return random_route(request);
    }
    if (route.empty() || !(route.front() == request.current_position))
        route.insert(route.begin(), request.current_position);
    return route;
}

}  // namespace aerosurvey
