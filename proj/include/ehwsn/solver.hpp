#ifndef EHWSN_SOLVER_HPP
#define EHWSN_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ehwsn/feasibility.hpp"
#include "ehwsn/problem.hpp"

namespace ehwsn {

struct BarrierOptions {
    double initial_mu = 1.0;
    double mu_factor = 10.0;
    double gap_tolerance = 1e-8;     ///< stop once (#constraints) * mu drops below this
    int max_outer_iterations = 60;
    int max_newton_iterations = 200;
    double newton_tolerance = 1e-14; ///< half the squared Newton decrement
    double armijo = 1e-4;
    double backtrack = 0.5;
};

/// One record per outer barrier iteration.
struct BarrierRecord {
    int outer = 0;
    double mu = 0.0;
    double objective = 0.0;
    double residual = 0.0;  ///< infinity norm of the barrier gradient after centering
    int newton_steps = 0;
};

struct SolverOptions {
    BarrierOptions barrier;
    double rate_margin = 1e-9;        ///< enforced c_approx - d lower bound
    double transfer_penalty = 1e-9;   ///< linear tie-break weight on sum(x)
    double high_sinr_threshold = 5.0; ///< links below it get a warning
    bool polish_transfers = true;     ///< shrink x to the least amount that keeps p feasible
};

struct Solution {
    Eigen::VectorXd power;
    Eigen::VectorXd log_power;
    Eigen::VectorXd transfer;  ///< per problem transfer link; zeros without transfer

    Eigen::VectorXd sinr;
    Eigen::VectorXd capacity_approx;
    Eigen::VectorXd capacity_exact;
    Eigen::VectorXd delay;
    double objective = 0.0;

    Eigen::VectorXd lambda;  ///< per energy-vector node; zero where no budget applies
    Eigen::VectorXd beta;    ///< per rate constraint, identically zero
    Eigen::VectorXd gamma;   ///< per transfer link
    Eigen::VectorXd rate_multiplier;  ///< barrier estimate on the rate margins

    bool transfers_enabled = false;
    double mu = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string termination;
    std::vector<BarrierRecord> trace;
    std::vector<std::string> warnings;
};

/// Minimizes total delay over log-powers with x = 0. `initial_log_power`
/// must be strictly feasible when given; otherwise the feasibility witness
/// is used. Throws ProblemInfeasible.
Solution solve_no_transfer(const SlotProblem& problem, const SolverOptions& options = {},
                           const std::optional<Eigen::VectorXd>& initial_log_power = std::nullopt);

struct InitialPoint {
    Eigen::VectorXd log_power;
    Eigen::VectorXd transfer;
};

/// Joint minimization over log-powers and transfers. Requires at least one
/// transfer link. Throws ProblemInfeasible.
Solution solve_with_transfer(const SlotProblem& problem, const SolverOptions& options = {},
                             const std::optional<InitialPoint>& initial = std::nullopt);

/// Fills the per-link metrics (SINR, rates, delays, objective) of a power
/// vector. Objective is +infinity when a rate does not exceed its flow.
void evaluate_links(const SlotProblem& problem, const Eigen::VectorXd& log_power, Solution& out);

struct KktReport {
    Eigen::VectorXd stationarity_power;     ///< dL/dptilde per link
    Eigen::VectorXd stationarity_transfer;  ///< dL/dx per transfer link
    Eigen::VectorXd slackness_budget;       ///< lambda_n * |budget slack| per budget node
    Eigen::VectorXd slackness_rate;         ///< beta_l * rate slack
    Eigen::VectorXd slackness_transfer;     ///< gamma_q * x_q
    double lemma1_max_beta = 0.0;           ///< largest barrier estimate of a rate multiplier
    /// Largest spread across one node's links of dDelay/dp (= -lambda_n at
    /// the optimum); empty when no node owns two links.
    std::optional<double> lemma2_max_spread;
    /// |lambda recomputed from the stationarity formula - reported lambda| for
    /// links of budget-tight nodes; zero elsewhere.
    Eigen::VectorXd lambda_residual;
    double min_dual = 0.0;

    double max_stationarity() const;
    double max_slackness() const;
};

KktReport kkt_report(const SlotProblem& problem, const Solution& solution);

}  // namespace ehwsn

#endif  // EHWSN_SOLVER_HPP
