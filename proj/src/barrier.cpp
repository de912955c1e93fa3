#include "barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace ehwsn::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Penalized {
    const ConvexProgram& program;
    double mu;

    /// f(z) - mu * sum log(-g_i(z)); +infinity outside the strict interior.
    double value(const Eigen::VectorXd& z) const {
        Eigen::VectorXd g;
        program.constraints(z, g, nullptr);
        if (!(g.array() < 0.0).all()) return kInf;
        const double f = program.objective(z, nullptr, nullptr);
        if (!std::isfinite(f)) return kInf;
        return f - mu * (-g.array()).log().sum();
    }

    void derivatives(const Eigen::VectorXd& z, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
        program.objective(z, &grad, &hess);
        Eigen::VectorXd g;
        Eigen::MatrixXd jac;
        program.constraints(z, g, &jac);
        const Eigen::VectorXd inv = (-g).cwiseInverse();
        grad.noalias() += mu * jac.transpose() * inv;
        hess.noalias() += mu * jac.transpose() * inv.cwiseAbs2().asDiagonal() * jac;
        program.add_constraint_curvature(z, mu * inv, hess);
    }
};

/// Multipliers at the final iterate. The barrier estimate mu / slack is
/// limited by how finely z resolves a nearly active constraint, so the
/// constraints with slack <= sqrt(mu) are refit by least squares on
/// grad f + J^T y = 0 and kept when the fit is nonnegative and no worse.
Eigen::VectorXd estimate_multipliers(const ConvexProgram& program, const Eigen::VectorXd& z, double mu) {
    Eigen::VectorXd grad, g;
    Eigen::MatrixXd jac;
    program.objective(z, &grad, nullptr);
    program.constraints(z, g, &jac);
    const Eigen::VectorXd slack = -g;
    Eigen::VectorXd y = mu * slack.cwiseInverse();

    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
        if (slack(i) <= std::sqrt(mu)) active.push_back(i);
    }
    if (active.empty()) return y;

    Eigen::VectorXd rhs = -grad;
    Eigen::MatrixXd ja(jac.cols(), static_cast<Eigen::Index>(active.size()));
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
        const auto it = std::find(active.begin(), active.end(), i);
        if (it == active.end()) {
            rhs.noalias() -= y(i) * jac.row(i).transpose();
        } else {
            ja.col(it - active.begin()) = jac.row(i).transpose();
        }
    }
    const Eigen::VectorXd fit = ja.colPivHouseholderQr().solve(rhs);
    if (!fit.allFinite() || fit.minCoeff() < 0.0) return y;

    Eigen::VectorXd refined = y;
    for (std::size_t k = 0; k < active.size(); ++k) refined(active[k]) = fit(static_cast<Eigen::Index>(k));
    const auto residual = [&](const Eigen::VectorXd& m) {
        return (grad + jac.transpose() * m).lpNorm<Eigen::Infinity>();
    };
    return residual(refined) <= residual(y) ? refined : y;
}

}  // namespace

BarrierResult minimize_barrier(const ConvexProgram& program, Eigen::VectorXd z0, const BarrierOptions& options) {
    BarrierResult result;
    result.z = std::move(z0);
    const auto m = static_cast<double>(program.constraint_count());
    double mu = options.initial_mu;

    for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
        const Penalized phi{program, mu};
        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
        double value = phi.value(result.z);
        int steps = 0;
        for (; steps < options.max_newton_iterations; ++steps) {
            phi.derivatives(result.z, grad, hess);
            Eigen::VectorXd step;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive()) step = -ldlt.solve(grad);
            double slope = step.size() ? grad.dot(step) : 0.0;
            if (!step.allFinite() || !(slope < 0.0)) {
                step = -grad;
                slope = -grad.squaredNorm();
            }
            if (-slope / 2.0 <= options.newton_tolerance) break;

            double t = 1.0;
            double trial = phi.value(result.z + step);
            while (!(trial <= value + options.armijo * t * slope) && t > 1e-20) {
                t *= options.backtrack;
                trial = phi.value(result.z + t * step);
            }
            if (!(trial <= value + options.armijo * t * slope)) break;  // stalled at round-off level
            ++result.iterations;
            result.z += t * step;
            value = trial;
        }
        phi.derivatives(result.z, grad, hess);
        result.trace.push_back({outer, mu, program.objective(result.z, nullptr, nullptr),
                                grad.lpNorm<Eigen::Infinity>(), steps});
        result.mu = mu;
        if (m * mu < options.gap_tolerance) {
            result.converged = true;
            result.termination = "duality gap below tolerance";
            break;
        }
        mu /= options.mu_factor;
    }
    if (!result.converged) result.termination = "outer iteration cap reached";
    program.constraints(result.z, result.constraint_values, nullptr);
    result.multipliers = estimate_multipliers(program, result.z, result.mu);
    return result;
}

}  // namespace ehwsn::detail
