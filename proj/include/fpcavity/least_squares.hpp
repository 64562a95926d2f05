#pragma once

// Small dense Levenberg-Marquardt solver used by the spectral and temporal
// fitters.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace fpcavity::fit
{
// Fills residuals (model - data) and the Jacobian d(residual)/d(param).
// Returns false when the parameters are outside the model's domain.
using ResidualFn = std::function<bool(const Eigen::VectorXd &params, Eigen::VectorXd &residuals,
                                      Eigen::MatrixXd &jacobian)>;

struct LmOptions
{
    int max_iterations = 300;
    double relative_tolerance = 1e-13;
    double initial_damping = 1e-3;
};

struct LmResult
{
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // s^2 (J^T J)^-1, s^2 the reduced chi-square
    double cost = 0.0;           // 0.5 * sum(r^2)
    double reduced_chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

LmResult levenberg_marquardt(const ResidualFn &residuals, Eigen::VectorXd initial, std::size_t samples,
                             const LmOptions &options = {});
} // namespace fpcavity::fit
