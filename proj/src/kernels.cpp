#include "aerosurvey/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace aerosurvey::kernels {

namespace {

// Below this many rows the thread fork costs more than the loop.
constexpr Eigen::Index kParallelMinRows = 64;

void check_square(const Eigen::MatrixXd& m, Eigen::Index n, const char* what) {
    if (m.rows() != n || m.cols() != n) throw std::invalid_argument(what);
}

inline void covariance_column(std::span<const Point2> points, double variance, double corr_distance,
                              Eigen::MatrixXd& out, Eigen::Index j) {
    const Point2 pj = points[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double d = distance(points[static_cast<std::size_t>(i)], pj);
        out(i, j) = variance * std::exp2(-d / corr_distance);
    }
}

// Rows [r0, r1) of y = A x, accumulated column by column.
inline void symv_rows(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y,
                      Eigen::Index r0, Eigen::Index r1) {
    for (Eigen::Index i = r0; i < r1; ++i) y[i] = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double xj = x[j];
        const double* col = a.data() + j * a.rows();
        for (Eigen::Index i = r0; i < r1; ++i) y[i] += col[i] * xj;
    }
}

// Upper-triangle pairs (i <= j) of column j.
inline void downdate_column(Eigen::MatrixXd& cov, const Eigen::VectorXd& gain, const Eigen::VectorXd& w,
                            Eigen::Index j) {
    for (Eigen::Index i = 0; i < j; ++i) {
        const double upper = cov(i, j) - gain[i] * w[j];
        const double lower = cov(j, i) - gain[j] * w[i];
        const double avg = 0.5 * (upper + lower);
        cov(i, j) = avg;
        cov(j, i) = avg;
    }
    cov(j, j) -= gain[j] * w[j];
}

inline void box_row(std::span<const double> in, std::size_t rows, std::size_t cols, std::span<double> out,
                    std::size_t r) {
    const std::size_t r0 = r == 0 ? 0 : r - 1;
    const std::size_t r1 = std::min(rows - 1, r + 1);
    for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t c0 = c == 0 ? 0 : c - 1;
        const std::size_t c1 = std::min(cols - 1, c + 1);
        double acc = 0.0;
        for (std::size_t rr = r0; rr <= r1; ++rr)
            for (std::size_t cc = c0; cc <= c1; ++cc) acc += in[rr * cols + cc];
        out[r * cols + c] = acc;
    }
}

void check_box(std::span<const double> in, std::size_t rows, std::size_t cols, std::span<double> out) {
    if (in.size() != rows * cols || out.size() != rows * cols)
        throw std::invalid_argument("box_filter3: field size does not match rows x cols");
}

}  // namespace

namespace serial {

void shadow_covariance(std::span<const Point2> points, double variance, double corr_distance,
                       Eigen::MatrixXd& out) {
    const auto n = static_cast<Eigen::Index>(points.size());
    out.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) covariance_column(points, variance, corr_distance, out, j);
}

void symv(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    check_square(a, x.size(), "symv: dimension mismatch");
    y.resize(x.size());
    symv_rows(a, x, y, 0, a.rows());
}

void rank_one_downdate(Eigen::MatrixXd& cov, const Eigen::VectorXd& gain, const Eigen::VectorXd& w) {
    check_square(cov, gain.size(), "rank_one_downdate: dimension mismatch");
    if (w.size() != gain.size()) throw std::invalid_argument("rank_one_downdate: dimension mismatch");
    for (Eigen::Index j = 0; j < cov.cols(); ++j) downdate_column(cov, gain, w, j);
}

void box_filter3(std::span<const double> in, std::size_t rows, std::size_t cols, std::span<double> out) {
    check_box(in, rows, cols, out);
    for (std::size_t r = 0; r < rows; ++r) box_row(in, rows, cols, out, r);
}

}  // namespace serial

namespace omp {

void shadow_covariance(std::span<const Point2> points, double variance, double corr_distance,
                       Eigen::MatrixXd& out) {
    const auto n = static_cast<Eigen::Index>(points.size());
    out.resize(n, n);
#pragma omp parallel for schedule(static) if (n >= kParallelMinRows)
    for (Eigen::Index j = 0; j < n; ++j) covariance_column(points, variance, corr_distance, out, j);
}

void symv(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    check_square(a, x.size(), "symv: dimension mismatch");
    const Eigen::Index n = a.rows();
    y.resize(n);
#pragma omp parallel if (n >= kParallelMinRows)
    {
        const Eigen::Index threads = omp_get_num_threads();
        const Eigen::Index id = omp_get_thread_num();
        const Eigen::Index chunk = (n + threads - 1) / threads;
        const Eigen::Index r0 = std::min(n, id * chunk);
        const Eigen::Index r1 = std::min(n, r0 + chunk);
        symv_rows(a, x, y, r0, r1);
    }
}

void rank_one_downdate(Eigen::MatrixXd& cov, const Eigen::VectorXd& gain, const Eigen::VectorXd& w) {
    check_square(cov, gain.size(), "rank_one_downdate: dimension mismatch");
    if (w.size() != gain.size()) throw std::invalid_argument("rank_one_downdate: dimension mismatch");
    const Eigen::Index n = cov.cols();
    // Column j touches only the pairs (i, j), i <= j, so columns are independent.
#pragma omp parallel for schedule(dynamic, 16) if (n >= kParallelMinRows)
    for (Eigen::Index j = 0; j < n; ++j) downdate_column(cov, gain, w, j);
}

void box_filter3(std::span<const double> in, std::size_t rows, std::size_t cols, std::span<double> out) {
    check_box(in, rows, cols, out);
    const auto n = static_cast<long>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= 4096)
    for (long r = 0; r < n; ++r) box_row(in, rows, cols, out, static_cast<std::size_t>(r));
}

}  // namespace omp

}  // namespace aerosurvey::kernels
