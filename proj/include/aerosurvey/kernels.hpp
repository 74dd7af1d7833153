#pragma once

// Dense inner loops of the estimator and planner.
//
// Every kernel exists twice: `serial` is the plain reference and `omp` splits
// the same loops across OpenMP threads. Each output element is computed by
// exactly one thread with the same operation order as the serial loop, so the
// two variants agree bit-for-bit for any thread count.

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "aerosurvey/spatial.hpp"

namespace aerosurvey::kernels {

namespace serial {

/// out(i, j) = variance * 2^(-|p_i - p_j| / corr_distance)
void shadow_covariance(std::span<const Point2> points, double variance, double corr_distance,
                       Eigen::MatrixXd& out);

/// y = A x for symmetric A.
void symv(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);

/// cov <- sym(cov - gain * w^T), where sym(M) = (M + M^T) / 2.
void rank_one_downdate(Eigen::MatrixXd& cov, const Eigen::VectorXd& gain, const Eigen::VectorXd& w);

/// 3x3 all-ones filter over a row-major rows x cols field; zero outside.
void box_filter3(std::span<const double> in, std::size_t rows, std::size_t cols, std::span<double> out);

}  // namespace serial

namespace omp {

void shadow_covariance(std::span<const Point2> points, double variance, double corr_distance,
                       Eigen::MatrixXd& out);
void symv(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
void rank_one_downdate(Eigen::MatrixXd& cov, const Eigen::VectorXd& gain, const Eigen::VectorXd& w);
void box_filter3(std::span<const double> in, std::size_t rows, std::size_t cols, std::span<double> out);

}  // namespace omp

}  // namespace aerosurvey::kernels
