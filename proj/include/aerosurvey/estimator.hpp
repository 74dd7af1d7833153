#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aerosurvey/channel.hpp"

namespace aerosurvey {

/// Floor on the likelihood variance of a single measurement (dB^2).
inline constexpr double kMinLikelihoodVar = 1e-9;

/// Gaussian posterior of one transmitter's grid power vector r^G.
struct PosteriorState {
    Eigen::VectorXd mean;  // dBm
    Eigen::MatrixXd cov;   // dB^2
};

/**
 * Linear-Gaussian likelihood of one measurement given r^G:
 *   y ~ N(a^T r^G + b, var).
 *
 * When the measurement location is a grid point, `grid_index` is set and
 * `a` is the unit vector of that point.
 */
struct ObservationCoefficients {
    Eigen::VectorXd a;
    double b = 0.0;
    double var = kMinLikelihoodVar;
    std::optional<std::size_t> grid_index;
};

/// The transmitter-independent part of the coefficients: a and var.
struct ObservationWeights {
    Eigen::VectorXd a;
    double var = kMinLikelihoodVar;
    std::optional<std::size_t> grid_index;
};

PosteriorState init_posterior(const GridPrior& prior, const Transmitter& tx);

ObservationWeights observation_weights(const GridPrior& prior, Point2 x);

ObservationCoefficients observation_coefficients(const GridPrior& prior, const Transmitter& tx, Point2 x);

/// Conditions the posterior on measurement y (gain form, symmetrized).
void online_update(PosteriorState& state, const ObservationCoefficients& coeffs, double y);

/// The rank-one form written directly:
///   cov - cov a a^T cov / (var + a^T cov a).
/// Kept as an algebraic cross-check of the gain form.
Eigen::MatrixXd rank_one_covariance(const Eigen::MatrixXd& cov, const Eigen::VectorXd& a, double var);

/// Closed-form posterior given all measurements at once (Gaussian
/// conditioning of the shadowing on the measurement vector).
PosteriorState batch_posterior(const GridPrior& prior, const Transmitter& tx, std::span<const Point2> positions,
                               std::span<const double> values);

/// P[r_j >= r_min] per grid point.
std::vector<double> service_probability(const Eigen::VectorXd& mean, const Eigen::VectorXd& var, double r_min);
std::vector<double> service_probability(const PosteriorState& state, double r_min);

/**
 * Posteriors of several transmitters over the same grid.
 *
 * The observation weights and likelihood variance do not depend on the
 * transmitter and the covariance update does not depend on the measured
 * value, so every transmitter has the same covariance. It is stored once.
 */
class JointPosterior {
public:
    JointPosterior(const GridPrior& prior, std::span<const Transmitter> transmitters);

    std::size_t transmitter_count() const { return means_.size(); }
    const Eigen::MatrixXd& cov() const { return cov_; }
    const Eigen::VectorXd& mean(std::size_t tx) const { return means_[tx]; }
    Eigen::VectorXd variance() const { return cov_.diagonal(); }
    PosteriorState state(std::size_t tx) const { return {means_[tx], cov_}; }

    /// One measurement with a value per transmitter.
    void update(Point2 x, std::span<const double> rss);

private:
    const GridPrior* prior_;
    std::vector<Transmitter> transmitters_;
    std::vector<Eigen::VectorXd> base_;
    std::vector<Eigen::VectorXd> means_;
    Eigen::MatrixXd cov_;
    Eigen::VectorXd w_;
    Eigen::VectorXd gain_;
};

}  // namespace aerosurvey
