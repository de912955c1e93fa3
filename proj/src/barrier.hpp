#ifndef EHWSN_SRC_BARRIER_HPP
#define EHWSN_SRC_BARRIER_HPP

#include <Eigen/Core>

#include "ehwsn/solver.hpp"

namespace ehwsn::detail {

/// Smooth convex program min f(z) s.t. g_i(z) < 0, handed to the log-barrier
/// engine. `objective` returns +infinity outside the domain of f.
class ConvexProgram {
public:
    virtual ~ConvexProgram() = default;

    virtual Eigen::Index dim() const = 0;
    virtual Eigen::Index constraint_count() const = 0;

    virtual double objective(const Eigen::VectorXd& z, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const = 0;
    /// Constraint values; `jacobian` (m x n) is filled when given.
    virtual void constraints(const Eigen::VectorXd& z, Eigen::VectorXd& values,
                             Eigen::MatrixXd* jacobian) const = 0;
    /// hess += sum_i weights(i) * Hessian of g_i.
    virtual void add_constraint_curvature(const Eigen::VectorXd& z, const Eigen::VectorXd& weights,
                                          Eigen::MatrixXd& hess) const = 0;
};

struct BarrierResult {
    Eigen::VectorXd z;
    Eigen::VectorXd constraint_values;
    Eigen::VectorXd multipliers;  ///< one per constraint, >= 0
    double mu = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string termination;
    std::vector<BarrierRecord> trace;
};

/// Log-barrier interior point: damped Newton centering with Armijo
/// backtracking, mu shrinking by a constant factor until m * mu < gap_tol.
/// `z0` must be strictly feasible.
BarrierResult minimize_barrier(const ConvexProgram& program, Eigen::VectorXd z0, const BarrierOptions& options);

}  // namespace ehwsn::detail

#endif  // EHWSN_SRC_BARRIER_HPP
