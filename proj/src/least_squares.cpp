#include "fpcavity/least_squares.hpp"

#include "fpcavity/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fpcavity::fit
{
LmResult levenberg_marquardt(const ResidualFn &residuals, Eigen::VectorXd initial, std::size_t samples,
                             const LmOptions &options)
{
    const auto n_params = static_cast<std::size_t>(initial.size());
    if (samples <= n_params)
    {
        throw ValidationError("least squares needs more samples than parameters");
    }

    Eigen::VectorXd p = std::move(initial);
    Eigen::VectorXd r(static_cast<Eigen::Index>(samples));
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(n_params));
    if (!residuals(p, r, jac) || !r.allFinite())
    {
        throw FitError("initial parameters are outside the model domain");
    }
    double cost = 0.5 * r.squaredNorm();

    LmResult out;
    double damping = options.initial_damping;
    Eigen::VectorXd r_trial(r.size());
    Eigen::MatrixXd jac_trial(jac.rows(), jac.cols());

    int it = 0;
    for (; it < options.max_iterations; ++it)
    {
        const Eigen::MatrixXd a = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        Eigen::VectorXd scale = a.diagonal().cwiseMax(1e-300);

        bool accepted = false;
        while (!accepted)
        {
            Eigen::MatrixXd damped = a;
            damped.diagonal() += damping * scale;
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            const Eigen::VectorXd trial = p + step;
            if (step.allFinite() && residuals(trial, r_trial, jac_trial) && r_trial.allFinite())
            {
                const double trial_cost = 0.5 * r_trial.squaredNorm();
                if (trial_cost <= cost)
                {
                    const double drop = cost - trial_cost;
                    const bool small_step = step.norm() <= options.relative_tolerance * (p.norm() + options.relative_tolerance);
                    p = trial;
                    std::swap(r, r_trial);
                    std::swap(jac, jac_trial);
                    cost = trial_cost;
                    damping = std::max(damping / 3.0, 1e-15);
                    accepted = true;
                    if (drop <= options.relative_tolerance * cost || small_step || cost == 0.0)
                    {
                        out.converged = true;
                    }
                    continue;
                }
            }
            damping *= 4.0;
            if (damping > 1e16)
            {
                // No downhill step left at working precision.
                out.converged = true;
                break;
            }
        }
        if (out.converged)
        {
            break;
        }
    }

    out.params = p;
    out.cost = cost;
    out.iterations = it + 1;
    const double dof = static_cast<double>(samples - n_params);
    out.reduced_chi2 = 2.0 * cost / dof;
    const Eigen::MatrixXd a = jac.transpose() * jac;
    out.covariance = out.reduced_chi2 * a.completeOrthogonalDecomposition().pseudoInverse();
    return out;
}
} // namespace fpcavity::fit
