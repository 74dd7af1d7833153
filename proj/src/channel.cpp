#include "aerosurvey/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aerosurvey/kernels.hpp"

namespace aerosurvey {

void ChannelParams::validate() const {
    if (!(frequency > 0.0)) throw std::invalid_argument("channel.frequency must be > 0");
    if (!(pathloss_exponent > 0.0)) throw std::invalid_argument("channel.pathloss_exponent must be > 0");
    if (!(shadow_var >= 0.0)) throw std::invalid_argument("channel.shadow_var must be >= 0");
    if (!(corr_distance > 0.0)) throw std::invalid_argument("channel.corr_distance must be > 0");
    if (!(fading_var >= 0.0)) throw std::invalid_argument("channel.fading_var must be >= 0");
    if (!(noise_var >= 0.0)) throw std::invalid_argument("channel.noise_var must be >= 0");
    if (!std::isfinite(shadow_mean)) throw std::invalid_argument("channel.shadow_mean must be finite");
}

double shadow_cov(double d, const ChannelParams& params) {
    if (d < 0.0) throw std::invalid_argument("shadow_cov: negative distance");
    return params.shadow_var * std::exp2(-d / params.corr_distance);
}

double free_space_gain(double distance_m, const ChannelParams& params) {
    if (!(distance_m > 0.0)) throw std::invalid_argument("free_space_gain: zero distance to transmitter");
    const double fspl =
        20.0 * std::log10(4.0 * std::numbers::pi * params.frequency * distance_m / kSpeedOfLight);
    return -(params.pathloss_exponent / 2.0) * fspl;
}

double base_power(Point2 x, double altitude, const Transmitter& tx, const ChannelParams& params) {
    const double dx = x.x - tx.position.x;
    const double dy = x.y - tx.position.y;
    const double dz = altitude - tx.position.z;
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    return tx.power_dbm + free_space_gain(d, params) - params.shadow_mean;
}

Eigen::VectorXd base_power_grid(const GridSpec& grid, const Transmitter& tx, const ChannelParams& params) {
    Eigen::VectorXd beta(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g)
        beta[static_cast<Eigen::Index>(g)] = base_power(index_to_point(grid, g), grid.altitude, tx, params);
    return beta;
}

GridPrior::GridPrior(const GridSpec& grid, const ChannelParams& params) : grid_(grid), params_(params) {
    grid_.validate();
    params_.validate();
    points_.reserve(grid_.size());
    for (std::size_t g = 0; g < grid_.size(); ++g) points_.push_back(index_to_point(grid_, g));

    kernels::omp::shadow_covariance(points_, params_.shadow_var, params_.corr_distance, shadow_);

    const double jitter = kCovarianceJitter * params_.shadow_var;
    if (params_.shadow_var > 0.0) {
        Eigen::MatrixXd loaded = shadow_;
        loaded.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(loaded);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("shadowing covariance factorization failed after jitter");
        shadow_factor_ = llt.matrixL();
        if (params_.fading_var == 0.0) {
            prior_llt_ = std::move(llt);
            return;
        }
    }
    if (has_prior_spread()) {
        Eigen::MatrixXd system = shadow_;
        system.diagonal().array() += params_.fading_var + jitter;
        prior_llt_.compute(system);
        if (prior_llt_.info() != Eigen::Success)
            throw std::runtime_error("prior covariance factorization failed");
    }
}

Eigen::VectorXd GridPrior::solve_prior(const Eigen::VectorXd& rhs) const {
    if (!has_prior_spread()) throw std::logic_error("solve_prior: prior covariance is zero");
    return prior_llt_.solve(rhs);
}

Eigen::VectorXd GridPrior::cross_shadow_cov(Point2 x) const {
    Eigen::VectorXd c(static_cast<Eigen::Index>(points_.size()));
    for (std::size_t i = 0; i < points_.size(); ++i)
        c[static_cast<Eigen::Index>(i)] = aerosurvey::shadow_cov(distance(points_[i], x), params_);
    return c;
}

GroundTruth::GroundTruth(const GridSpec& grid, std::vector<Eigen::VectorXd> power)
    : grid_(grid), power_(std::move(power)) {
    for (const auto& p : power_)
        if (p.size() != static_cast<Eigen::Index>(grid_.size()))
            throw std::invalid_argument("ground truth: power vector length differs from grid size");
}

namespace {

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
    if (t == 0.0) return p1;
    const double c1 = -p0 + p2;
    const double c2 = 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3;
    const double c3 = -p0 + 3.0 * p1 - 3.0 * p2 + p3;
    return 0.5 * (2.0 * p1 + t * (c1 + t * (c2 + t * c3)));
}

// Cell index and fractional offset of coordinate u (in grid units) on an axis of n points.
std::pair<long, double> locate(double u, std::size_t n) {
    if (n == 1) return {0, 0.0};
    const double max_cell = static_cast<double>(n - 2);
    const double cell = std::clamp(std::floor(u), 0.0, max_cell);
    return {static_cast<long>(cell), std::clamp(u - cell, 0.0, 1.0)};
}

}  // namespace

double GroundTruth::interpolate(std::size_t tx, Point2 x) const {
    if (!grid_.contains(x)) throw std::out_of_range("true_power: point outside the grid");
    const auto& values = power_.at(tx);
    const auto [c0, tc] = locate((x.x - grid_.origin.x) / grid_.spacing, grid_.cols);
    const auto [r0, tr] = locate((x.y - grid_.origin.y) / grid_.spacing, grid_.rows);
    const long rows = static_cast<long>(grid_.rows);
    const long cols = static_cast<long>(grid_.cols);
    auto at = [&](long r, long c) {
        r = std::clamp(r, 0L, rows - 1);
        c = std::clamp(c, 0L, cols - 1);
        return values[r * cols + c];
    };
    std::array<double, 4> along_x{};
    for (long k = 0; k < 4; ++k) {
        const long r = r0 - 1 + k;
        along_x[static_cast<std::size_t>(k)] =
            catmull_rom(at(r, c0 - 1), at(r, c0), at(r, c0 + 1), at(r, c0 + 2), tc);
    }
    return catmull_rom(along_x[0], along_x[1], along_x[2], along_x[3], tr);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    auto splitmix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return splitmix(seed ^ splitmix(stream));
}

std::vector<Transmitter> place_transmitters(const GridSpec& grid, std::size_t count, double height,
                                            double power_dbm, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(grid.origin.x, grid.origin.x + grid.width());
    std::uniform_real_distribution<double> uy(grid.origin.y, grid.origin.y + grid.height());
    std::vector<Transmitter> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double x = ux(rng);
        const double y = uy(rng);
        out.push_back({{x, y, height}, power_dbm});
    }
    return out;
}

GroundTruth sample_ground_truth(const GridPrior& prior, std::span<const Transmitter> transmitters,
                                std::uint64_t seed) {
    const auto& params = prior.params();
    const auto n = static_cast<Eigen::Index>(prior.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<Eigen::VectorXd> power;
    power.reserve(transmitters.size());
    Eigen::VectorXd z(n);
    for (const auto& tx : transmitters) {
        Eigen::VectorXd r = base_power_grid(prior.grid(), tx, params);
        if (params.shadow_var > 0.0) {
            for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
            r -= prior.shadow_factor().triangularView<Eigen::Lower>() * z;
        }
        if (params.fading_var > 0.0) {
            const double sd = std::sqrt(params.fading_var);
            for (Eigen::Index i = 0; i < n; ++i) r[i] += sd * normal(rng);
        }
        power.push_back(std::move(r));
    }
    return GroundTruth(prior.grid(), std::move(power));
}

GroundTruth sample_ground_truth(const GridSpec& grid, const ChannelParams& params, std::uint64_t seed) {
    const GridPrior prior(grid, params);
    return sample_ground_truth(prior, params.transmitters, seed);
}

std::vector<double> true_power(const GroundTruth& gt, Point2 x) {
    std::vector<double> out(gt.transmitter_count());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = gt.interpolate(k, x);
    return out;
}

Measurement take_measurement(const GroundTruth& gt, Point2 x, const ChannelParams& params,
                             std::mt19937_64& rng) {
    Measurement m{x, true_power(gt, x)};
    if (params.noise_var > 0.0) {
        std::normal_distribution<double> noise(0.0, std::sqrt(params.noise_var));
        for (auto& v : m.rss) v += noise(rng);
    }
    return m;
}

}  // namespace aerosurvey
