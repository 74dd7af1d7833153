#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aerosurvey/channel.hpp"
#include "aerosurvey/estimator.hpp"
#include "aerosurvey/planner.hpp"
#include "aerosurvey/spatial.hpp"
#include "aerosurvey/uncertainty.hpp"

namespace aerosurvey {

/// Transmitters drawn uniformly over the grid rectangle for every run.
struct RandomPlacement {
    std::size_t count = 2;
    double height = 10.0;
    double power_dbm = 10.0;
};

struct StopRule {
    std::optional<std::size_t> max_measurements = 300;
    std::optional<double> uncertainty_threshold;
};

struct SurveyConfig {
    GridSpec grid;
    ChannelParams channel;
    /// When set, channel.transmitters is ignored and redrawn per run.
    std::optional<RandomPlacement> random_transmitters = RandomPlacement{};
    double r_min = 5.0;
    double measurement_spacing = 5.0;
    PlannerKind planner = PlannerKind::min_cost;
    Aggregation aggregation = Aggregation::max;
    MapKind target = MapKind::service;
    ShortestPathEngine shortest_path = ShortestPathEngine::dijkstra;
    StopRule stop;
    double speed = 5.0;
    std::optional<Point2> start;  // defaults to the grid origin
    std::uint64_t seed = 0;

    void validate() const;
    Point2 start_position() const { return start.value_or(grid.origin); }
};

struct MetricsRow {
    std::size_t run = 0;
    std::size_t t = 0;
    double meters = 0.0;
    double total_unc_power = 0.0;
    double total_unc_service = 0.0;
    double service_error_rate = 0.0;
    double max_posterior_var = 0.0;  // not exported; used by monotonicity checks
};

/// Estimator state captured after measurement t.
struct Snapshot {
    std::size_t t = 0;
    std::vector<Eigen::VectorXd> mean;
    std::vector<std::vector<double>> service_prob;
    UncertaintyField power;
    UncertaintyField service;
};

struct SurveyRecord {
    std::size_t run = 0;
    std::vector<Transmitter> transmitters;
    GroundTruth truth;
    std::vector<Measurement> measurements;
    std::vector<Waypoint> waypoints;
    std::vector<MetricsRow> metrics;
    std::vector<Snapshot> snapshots;
};

struct SurveyOptions {
    std::size_t run = 0;
    std::vector<std::size_t> snapshots;
    /// Reused across runs when given; must match config.grid and config.channel.
    const GridPrior* prior = nullptr;
};

/// Fraction of grid points where the thresholded estimate (p >= 0.5) differs
/// from the truth. A point is served when any transmitter serves it.
double service_error_rate(std::span<const std::vector<double>> p, const GroundTruth& gt, double r_min);

/// Seed of run `run` in an experiment seeded with `seed`.
std::uint64_t run_seed(std::uint64_t seed, std::size_t run);

SurveyRecord run_survey(const SurveyConfig& config, const SurveyOptions& options = {});

struct MetricStats {
    double mean = 0.0;
    double std = 0.0;
};

struct MonteCarloRow {
    std::size_t t = 0;
    MetricStats meters;
    MetricStats total_unc_power;
    MetricStats total_unc_service;
    MetricStats service_error_rate;
};

struct MonteCarloResult {
    PlannerKind planner = PlannerKind::min_cost;
    std::size_t runs = 0;
    std::vector<MonteCarloRow> rows;
    std::vector<std::vector<MetricsRow>> per_run;
};

/// Reads AEROSURVEY_THREADS (0 or unset means the OpenMP default).
int configured_threads();

/**
 * Independent realizations of the survey, aligned by measurement index.
 *
 * Runs execute in parallel on `threads` OpenMP threads (0 = configured_threads());
 * each run draws from streams derived from (config.seed, run id) only, and
 * statistics are accumulated in run order, so the result does not depend on
 * the thread count.
 */
MonteCarloResult monte_carlo(const SurveyConfig& config, std::size_t runs, int threads = 0);
MonteCarloResult monte_carlo(const SurveyConfig& config, const GridPrior& prior, std::size_t runs, int threads = 0);

/// Mean and population standard deviation over runs, per t.
std::vector<MonteCarloRow> summarize_runs(std::span<const std::vector<MetricsRow>> per_run);

}  // namespace aerosurvey
