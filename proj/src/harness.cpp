#include "aerosurvey/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace aerosurvey {

namespace {

enum Stream : std::uint64_t { kPlacementStream = 1, kShadowStream = 2, kNoiseStream = 3, kPlannerStream = 4 };

// A planner that keeps producing zero-length routes cannot make progress.
constexpr int kMaxIdleReplans = 10000;

}  // namespace

void SurveyConfig::validate() const {
    grid.validate();
    if (grid.size() < 2) throw std::invalid_argument("grid must contain at least two points");
    channel.validate();
    if (!(channel.prior_var() > 0.0))
        throw std::invalid_argument("channel.shadow_var + channel.fading_var must be > 0");
    if (random_transmitters) {
        if (random_transmitters->count == 0) throw std::invalid_argument("channel.num_transmitters must be >= 1");
    } else if (channel.transmitters.empty()) {
        throw std::invalid_argument("channel.transmitters must not be empty");
    }
    if (!(measurement_spacing > 0.0)) throw std::invalid_argument("measurement_spacing must be > 0");
    if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
    if (!std::isfinite(r_min)) throw std::invalid_argument("r_min must be finite");
    if (!stop.max_measurements && !stop.uncertainty_threshold)
        throw std::invalid_argument("stop: set max_measurements and/or uncertainty_threshold");
    if (stop.uncertainty_threshold && !(*stop.uncertainty_threshold >= 0.0 && *stop.uncertainty_threshold <= 1.0))
        throw std::invalid_argument("stop.uncertainty_threshold must be in [0, 1]");
    if (!grid.contains(start_position())) throw std::invalid_argument("start lies outside the grid");
}

double service_error_rate(std::span<const std::vector<double>> p, const GroundTruth& gt, double r_min) {
    if (p.size() != gt.transmitter_count() || p.empty())
        throw std::invalid_argument("service_error_rate: one probability vector per transmitter");
    const std::size_t n = gt.grid().size();
    std::size_t wrong = 0;
    for (std::size_t j = 0; j < n; ++j) {
        bool estimated = false;
        bool truth = false;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p[k].size() != n) throw std::invalid_argument("service_error_rate: length mismatch");
            estimated = estimated || p[k][j] >= 0.5;
            truth = truth || gt.grid_power(k)[static_cast<Eigen::Index>(j)] >= r_min;
        }
        if (estimated != truth) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(n);
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t run) { return derive_seed(seed, 0x5eed0000ULL + run); }

namespace {

class Survey {
public:
    Survey(const SurveyConfig& config, const SurveyOptions& options, const GridPrior& prior)
        : config_(config),
          options_(options),
          seed_(run_seed(config.seed, options.run)),
          noise_rng_(derive_seed(seed_, kNoiseStream)),
          planner_rng_(derive_seed(seed_, kPlannerStream)),
          graph_(config.grid) {
        record_.run = options.run;
        if (config.random_transmitters) {
            std::mt19937_64 rng(derive_seed(seed_, kPlacementStream));
            const auto& placement = *config.random_transmitters;
            record_.transmitters =
                place_transmitters(config.grid, placement.count, placement.height, placement.power_dbm, rng);
        } else {
            record_.transmitters = config.channel.transmitters;
        }
        record_.truth = sample_ground_truth(prior, record_.transmitters, derive_seed(seed_, kShadowStream));
        posterior_.emplace(prior, record_.transmitters);
        budget_ = config.stop.max_measurements.value_or(std::numeric_limits<std::size_t>::max());
    }

    SurveyRecord run() {
        PathSampler sampler(config_.measurement_spacing);
        std::vector<Point2> samples;
        Point2 position = config_.start_position();
        const Waypoint origin[] = {position};
        record_.waypoints.push_back(position);
        sampler.feed(origin, samples);
        measure(samples.front());

        int idle = 0;
        while (!done_) {
            const UncertaintyField& field = config_.target == MapKind::service ? service_field_ : power_field_;
            const PlanRequest request{position, field, graph_, planner_rng_};
            const auto route = plan_route(config_.planner, request, config_.shortest_path);
            if (path_length(route) == 0.0) {
                if (++idle > kMaxIdleReplans) throw std::runtime_error("planner produced no motion");
                continue;
            }
            idle = 0;
            record_.waypoints.insert(record_.waypoints.end(), route.begin() + 1, route.end());
            samples.clear();
            sampler.feed(route, samples);
            for (const Point2& s : samples) {
                measure(s);
                if (done_) break;
            }
            position = route.back();
        }
        return std::move(record_);
    }

private:
    void measure(Point2 x) {
        Measurement m = take_measurement(record_.truth, x, config_.channel, noise_rng_);
        posterior_->update(m.position, m.rss);
        record_.measurements.push_back(std::move(m));
        const std::size_t t = record_.measurements.size() - 1;

        const Eigen::VectorXd var = posterior_->variance();
        std::vector<std::vector<double>> probs;
        std::vector<UncertaintyField> service_fields;
        for (std::size_t k = 0; k < posterior_->transmitter_count(); ++k) {
            probs.push_back(service_probability(posterior_->mean(k), var, config_.r_min));
            service_fields.push_back(service_uncertainty(probs.back()));
        }
        // Every transmitter shares the covariance, so their power fields coincide.
        power_field_ = power_uncertainty(var, config_.channel);
        service_field_ = aggregate(service_fields, config_.aggregation);

        MetricsRow row;
        row.run = options_.run;
        row.t = t;
        row.meters = static_cast<double>(t) * config_.measurement_spacing;
        row.total_unc_power = total_uncertainty(power_field_);
        row.total_unc_service = total_uncertainty(service_field_);
        row.service_error_rate = service_error_rate(probs, record_.truth, config_.r_min);
        row.max_posterior_var = var.maxCoeff();
        record_.metrics.push_back(row);

        if (std::find(options_.snapshots.begin(), options_.snapshots.end(), t) != options_.snapshots.end()) {
            Snapshot snap;
            snap.t = t;
            for (std::size_t k = 0; k < posterior_->transmitter_count(); ++k) snap.mean.push_back(posterior_->mean(k));
            snap.service_prob = probs;
            snap.power = power_field_;
            snap.service = service_field_;
            record_.snapshots.push_back(std::move(snap));
        }

        const double target_total = config_.target == MapKind::service ? row.total_unc_service : row.total_unc_power;
        if (t >= budget_) done_ = true;
        if (config_.stop.uncertainty_threshold && target_total <= *config_.stop.uncertainty_threshold) done_ = true;
    }

    const SurveyConfig& config_;
    const SurveyOptions& options_;
    std::uint64_t seed_;
    std::mt19937_64 noise_rng_;
    std::mt19937_64 planner_rng_;
    MotionGraph graph_;
    std::optional<JointPosterior> posterior_;
    SurveyRecord record_;
    UncertaintyField power_field_;
    UncertaintyField service_field_;
    std::size_t budget_ = 0;
    bool done_ = false;
};

}  // namespace

SurveyRecord run_survey(const SurveyConfig& config, const SurveyOptions& options) {
    config.validate();
    if (options.prior) return Survey(config, options, *options.prior).run();
    const GridPrior prior(config.grid, config.channel);
    return Survey(config, options, prior).run();
}

int configured_threads() {
    if (const char* env = std::getenv("AEROSURVEY_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return omp_get_max_threads();
}

std::vector<MonteCarloRow> summarize_runs(std::span<const std::vector<MetricsRow>> per_run) {
    if (per_run.empty()) return {};
    const std::size_t steps = per_run.front().size();
    for (const auto& run : per_run)
        if (run.size() != steps) throw std::invalid_argument("summarize_runs: runs differ in length");
    const double n = static_cast<double>(per_run.size());
    std::vector<MonteCarloRow> rows(steps);
    auto stats = [&](std::size_t t, double MetricsRow::*field) {
        double sum = 0.0;
        for (const auto& run : per_run) sum += run[t].*field;
        const double mean = sum / n;
        double sq = 0.0;
        for (const auto& run : per_run) sq += (run[t].*field - mean) * (run[t].*field - mean);
        return MetricStats{mean, std::sqrt(sq / n)};
    };
    for (std::size_t t = 0; t < steps; ++t) {
        rows[t].t = t;
        rows[t].meters = stats(t, &MetricsRow::meters);
        rows[t].total_unc_power = stats(t, &MetricsRow::total_unc_power);
        rows[t].total_unc_service = stats(t, &MetricsRow::total_unc_service);
        rows[t].service_error_rate = stats(t, &MetricsRow::service_error_rate);
    }
    return rows;
}

MonteCarloResult monte_carlo(const SurveyConfig& config, std::size_t runs, int threads) {
    config.validate();
    const GridPrior prior(config.grid, config.channel);
    return monte_carlo(config, prior, runs, threads);
}

MonteCarloResult monte_carlo(const SurveyConfig& config, const GridPrior& prior, std::size_t runs, int threads) {
    config.validate();
    if (runs == 0) throw std::invalid_argument("monte_carlo: runs must be >= 1");
    if (!config.stop.max_measurements) throw std::invalid_argument("monte_carlo: stop.max_measurements is required");
    const std::size_t steps = *config.stop.max_measurements + 1;
    if (threads <= 0) threads = configured_threads();

    MonteCarloResult result;
    result.planner = config.planner;
    result.runs = runs;
    result.per_run.resize(runs);
    std::vector<std::exception_ptr> errors(runs);

    const auto count = static_cast<long>(runs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long r = 0; r < count; ++r) {
        const auto run = static_cast<std::size_t>(r);
        try {
            SurveyOptions options;
            options.run = run;
            options.prior = &prior;
            auto rows = run_survey(config, options).metrics;
            // A threshold stop ends a run early; hold its last state.
            while (rows.size() < steps) {
                MetricsRow last = rows.back();
                ++last.t;
                rows.push_back(last);
            }
            result.per_run[run] = std::move(rows);
        } catch (...) {
            errors[run] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    result.rows = summarize_runs(result.per_run);
    return result;
}

}  // namespace aerosurvey
