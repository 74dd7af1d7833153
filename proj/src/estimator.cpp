#include "aerosurvey/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aerosurvey/kernels.hpp"

namespace aerosurvey {

namespace {

double dot_a(const Eigen::VectorXd& a, const std::optional<std::size_t>& grid_index, const Eigen::VectorXd& v) {
    if (grid_index) return v[static_cast<Eigen::Index>(*grid_index)];
    return a.dot(v);
}

// w = cov a and gain = w / (var + a^T w). Unit vectors skip the mat-vec.
void compute_gain(const Eigen::MatrixXd& cov, const Eigen::VectorXd& a, const std::optional<std::size_t>& grid_index,
                  double var, Eigen::VectorXd& w, Eigen::VectorXd& gain) {
    if (grid_index) {
        w = cov.col(static_cast<Eigen::Index>(*grid_index));
    } else {
        kernels::omp::symv(cov, a, w);
    }
    const double denom = var + dot_a(a, grid_index, w);
    gain = w / denom;
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(what);
}

}  // namespace

PosteriorState init_posterior(const GridPrior& prior, const Transmitter& tx) {
    PosteriorState state;
    state.mean = base_power_grid(prior.grid(), tx, prior.params());
    state.cov = prior.shadow_cov();
    state.cov.diagonal().array() += prior.params().fading_var;
    return state;
}

ObservationWeights observation_weights(const GridPrior& prior, Point2 x) {
    const auto& grid = prior.grid();
    const auto& params = prior.params();
    if (!grid.contains(x)) throw std::out_of_range("observation outside the grid");
    const auto n = static_cast<Eigen::Index>(prior.size());

    ObservationWeights w;
    std::size_t g = 0;
    if (on_grid_point(grid, x, g)) {
        // (C_s + sf I)^{-1} times its own column g: a unit vector, exactly.
        w.a = Eigen::VectorXd::Unit(n, static_cast<Eigen::Index>(g));
        w.var = std::max(params.noise_var, kMinLikelihoodVar);
        w.grid_index = g;
        return w;
    }
    if (!prior.has_prior_spread()) {
        w.a = Eigen::VectorXd::Zero(n);
        w.var = std::max(params.noise_var, kMinLikelihoodVar);
        return w;
    }
    // Off the grid the fading cross-covariance vanishes.
    const Eigen::VectorXd c = prior.cross_shadow_cov(x);
    w.a = prior.solve_prior(c);
    const double var = params.shadow_var + params.fading_var + params.noise_var - c.dot(w.a);
    w.var = std::max(var, kMinLikelihoodVar);
    return w;
}

ObservationCoefficients observation_coefficients(const GridPrior& prior, const Transmitter& tx, Point2 x) {
    ObservationWeights w = observation_weights(prior, x);
    ObservationCoefficients coeffs;
    if (!w.grid_index) {
        const Eigen::VectorXd beta = base_power_grid(prior.grid(), tx, prior.params());
        coeffs.b = base_power(x, prior.grid().altitude, tx, prior.params()) - w.a.dot(beta);
    }
    coeffs.a = std::move(w.a);
    coeffs.var = w.var;
    coeffs.grid_index = w.grid_index;
    return coeffs;
}

void online_update(PosteriorState& state, const ObservationCoefficients& coeffs, double y) {
    const auto n = state.mean.size();
    if (coeffs.a.size() != n || state.cov.rows() != n || state.cov.cols() != n)
        throw std::invalid_argument("online_update: dimension mismatch");
    check_finite(y, "online_update: non-finite measurement");
    check_finite(coeffs.b, "online_update: non-finite offset");
    check_finite(coeffs.var, "online_update: non-finite variance");
    if (coeffs.var < kMinLikelihoodVar) throw std::invalid_argument("online_update: likelihood variance below floor");

    Eigen::VectorXd w;
    Eigen::VectorXd gain;
    compute_gain(state.cov, coeffs.a, coeffs.grid_index, coeffs.var, w, gain);
    const double innovation = y - dot_a(coeffs.a, coeffs.grid_index, state.mean) - coeffs.b;
    state.mean += gain * innovation;
    kernels::omp::rank_one_downdate(state.cov, gain, w);
}

Eigen::MatrixXd rank_one_covariance(const Eigen::MatrixXd& cov, const Eigen::VectorXd& a, double var) {
    const Eigen::VectorXd ca = cov * a;
    const double denom = var + a.dot(ca);
    return cov - (ca * ca.transpose()) / denom;
}

PosteriorState batch_posterior(const GridPrior& prior, const Transmitter& tx, std::span<const Point2> positions,
                               std::span<const double> values) {
    if (positions.size() != values.size())
        throw std::invalid_argument("batch_posterior: positions and values differ in length");
    PosteriorState state = init_posterior(prior, tx);
    const auto& params = prior.params();
    if (positions.empty() || params.shadow_var == 0.0) return state;

    const auto t = static_cast<Eigen::Index>(positions.size());
    const auto n = static_cast<Eigen::Index>(prior.size());
    const double noise = params.fading_var + params.noise_var;
    const double loading = noise > 0.0 ? noise : kCovarianceJitter * params.shadow_var;

    Eigen::MatrixXd gram(t, t);
    Eigen::MatrixXd cross(n, t);
    Eigen::VectorXd residual(t);
    for (Eigen::Index j = 0; j < t; ++j) {
        const Point2 pj = positions[static_cast<std::size_t>(j)];
        if (!prior.grid().contains(pj)) throw std::out_of_range("batch_posterior: measurement outside the grid");
        for (Eigen::Index i = 0; i < t; ++i)
            gram(i, j) = shadow_cov(distance(positions[static_cast<std::size_t>(i)], pj), params);
        gram(j, j) += loading;
        cross.col(j) = prior.cross_shadow_cov(pj);
        residual[j] = values[static_cast<std::size_t>(j)] - base_power(pj, prior.grid().altitude, tx, params);
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw std::runtime_error("batch_posterior: singular measurement covariance");

    // r^G = beta^G - s^G + f^G and Cov[s^G, y] = -cross, so the shadowing
    // posterior mean is -cross G^{-1} (y - beta_t) and r^G's is beta^G minus it.
    state.mean += cross * llt.solve(residual);
    const Eigen::MatrixXd solved = llt.solve(cross.transpose());
    state.cov.noalias() -= cross * solved;
    state.cov = 0.5 * (state.cov + state.cov.transpose()).eval();
    return state;
}

std::vector<double> service_probability(const Eigen::VectorXd& mean, const Eigen::VectorXd& var, double r_min) {
    if (mean.size() != var.size()) throw std::invalid_argument("service_probability: dimension mismatch");
    std::vector<double> p(static_cast<std::size_t>(mean.size()));
    for (Eigen::Index j = 0; j < mean.size(); ++j) {
        const double v = std::max(var[j], 0.0);
        double pj;
        if (v == 0.0) {
            pj = mean[j] >= r_min ? 1.0 : 0.0;
        } else {
            pj = 0.5 * std::erfc((r_min - mean[j]) / std::sqrt(2.0 * v));
        }
        p[static_cast<std::size_t>(j)] = pj;
    }
    return p;
}

std::vector<double> service_probability(const PosteriorState& state, double r_min) {
    return service_probability(state.mean, state.cov.diagonal(), r_min);
}

JointPosterior::JointPosterior(const GridPrior& prior, std::span<const Transmitter> transmitters)
    : prior_(&prior), transmitters_(transmitters.begin(), transmitters.end()) {
    for (const auto& tx : transmitters_) {
        base_.push_back(base_power_grid(prior.grid(), tx, prior.params()));
        means_.push_back(base_.back());
    }
    cov_ = prior.shadow_cov();
    cov_.diagonal().array() += prior.params().fading_var;
}

void JointPosterior::update(Point2 x, std::span<const double> rss) {
    if (rss.size() != means_.size()) throw std::invalid_argument("JointPosterior::update: one value per transmitter");
    for (double y : rss) check_finite(y, "JointPosterior::update: non-finite measurement");
    const ObservationWeights weights = observation_weights(*prior_, x);
    compute_gain(cov_, weights.a, weights.grid_index, weights.var, w_, gain_);
    for (std::size_t k = 0; k < means_.size(); ++k) {
        double b = 0.0;
        if (!weights.grid_index)
            b = base_power(x, prior_->grid().altitude, transmitters_[k], prior_->params()) - weights.a.dot(base_[k]);
        const double innovation = rss[k] - dot_a(weights.a, weights.grid_index, means_[k]) - b;
        means_[k] += gain_ * innovation;
    }
    kernels::omp::rank_one_downdate(cov_, gain_, w_);
}

}  // namespace aerosurvey
