#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aerosurvey/spatial.hpp"

namespace aerosurvey {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Relative diagonal loading added before factorizing shadowing covariances.
inline constexpr double kCovarianceJitter = 1e-9;

struct Transmitter {
    Point3 position{};
    double power_dbm = 10.0;
};

/// Propagation constants. Powers in dBm, variances in dB^2, distances in m.
struct ChannelParams {
    std::vector<Transmitter> transmitters;
    double frequency = 2.4e9;
    double pathloss_exponent = 2.0;
    double shadow_var = 9.0;
    double shadow_mean = 0.0;
    double corr_distance = 50.0;
    double fading_var = 0.0;
    double noise_var = 0.0;

    void validate() const;
    double prior_var() const { return shadow_var + fading_var; }
};

/// Shadowing covariance at distance d: shadow_var * 2^(-d / corr_distance).
double shadow_cov(double d, const ChannelParams& params);

/// Free-space gain scaled by pathloss_exponent / 2, in dB (negative).
double free_space_gain(double distance_m, const ChannelParams& params);

/// P_Tx + g(x) - shadow_mean, with the 3D distance from the agent at
/// `altitude` above x to the transmitter.
double base_power(Point2 x, double altitude, const Transmitter& tx, const ChannelParams& params);

Eigen::VectorXd base_power_grid(const GridSpec& grid, const Transmitter& tx, const ChannelParams& params);

/**
 * Transmitter-independent second-order model of the map on the grid.
 *
 * Holds the grid shadowing covariance and its factorizations. Building it is
 * the O(N^3) step of a run; it is immutable afterwards and may be shared by
 * concurrent runs over the same grid and channel constants.
 */
class GridPrior {
public:
    GridPrior(const GridSpec& grid, const ChannelParams& params);

    const GridSpec& grid() const { return grid_; }
    const ChannelParams& params() const { return params_; }
    std::span<const Point2> points() const { return points_; }
    std::size_t size() const { return points_.size(); }

    /// C_s, the N x N shadowing covariance (no jitter).
    const Eigen::MatrixXd& shadow_cov() const { return shadow_; }

    /// Lower factor L with L L^T = C_s + jitter I; empty when shadow_var == 0.
    const Eigen::MatrixXd& shadow_factor() const { return shadow_factor_; }

    /// Whether C_s + fading_var I is nonzero, i.e. the grid carries a prior spread.
    bool has_prior_spread() const { return params_.prior_var() > 0.0; }

    /// (C_s + fading_var I + jitter I)^{-1} rhs.
    Eigen::VectorXd solve_prior(const Eigen::VectorXd& rhs) const;

    /// Cov[s(x), s^G] as a column vector.
    Eigen::VectorXd cross_shadow_cov(Point2 x) const;

private:
    GridSpec grid_;
    ChannelParams params_;
    std::vector<Point2> points_;
    Eigen::MatrixXd shadow_;
    Eigen::MatrixXd shadow_factor_;
    Eigen::LLT<Eigen::MatrixXd> prior_llt_;
};

/// The hidden true map: grid power per transmitter plus a cubic interpolant.
class GroundTruth {
public:
    GroundTruth() = default;
    GroundTruth(const GridSpec& grid, std::vector<Eigen::VectorXd> power);

    const GridSpec& grid() const { return grid_; }
    std::size_t transmitter_count() const { return power_.size(); }
    const Eigen::VectorXd& grid_power(std::size_t tx) const { return power_[tx]; }

    /// Separable Catmull-Rom interpolation; border cells replicate the edge.
    double interpolate(std::size_t tx, Point2 x) const;

private:
    GridSpec grid_;
    std::vector<Eigen::VectorXd> power_;
};

struct Measurement {
    Point2 position{};
    std::vector<double> rss;  // dBm, one entry per transmitter
};

/// Mixes a seed with a stream label into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Transmitters drawn uniformly over the grid rectangle at `height`.
std::vector<Transmitter> place_transmitters(const GridSpec& grid, std::size_t count, double height,
                                            double power_dbm, std::mt19937_64& rng);

/// r^G = beta^G - s^G + f^G per transmitter, with independent draws.
GroundTruth sample_ground_truth(const GridPrior& prior, std::span<const Transmitter> transmitters,
                                std::uint64_t seed);

/// Convenience overload that factorizes the covariance itself.
GroundTruth sample_ground_truth(const GridSpec& grid, const ChannelParams& params, std::uint64_t seed);

std::vector<double> true_power(const GroundTruth& gt, Point2 x);

Measurement take_measurement(const GroundTruth& gt, Point2 x, const ChannelParams& params,
                             std::mt19937_64& rng);

}  // namespace aerosurvey
