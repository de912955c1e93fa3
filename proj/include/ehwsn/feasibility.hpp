#ifndef EHWSN_FEASIBILITY_HPP
#define EHWSN_FEASIBILITY_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ehwsn/channel.hpp"
#include "ehwsn/problem.hpp"

namespace ehwsn {

/// Which rate each link must reach: the Shannon rate 0.5 ln(1 + SINR)
/// (SINR >= e^{2d} - 1) or the high-SINR rate 0.5 ln(SINR) (SINR >= e^{2d}).
enum class RateModel { exact, high_sinr };

/// Largest eigenvalue of a nonnegative matrix by power iteration on M + I.
double perron_root(const Eigen::MatrixXd& m, double tol = 1e-10, int max_iterations = 10000);

/// The fixed-point data p = M p + b whose least solution is the minimum power
/// vector meeting every rate target with equality.
struct RateFixedPoint {
    Eigen::MatrixXd m;
    Eigen::VectorXd b;
};

RateFixedPoint rate_fixed_point(const ChannelState<double>& ch, const Eigen::VectorXd& flows,
                                RateModel model = RateModel::exact);

/// Componentwise-minimal powers meeting all rate targets. Throws
/// RateInfeasible when the spectral radius of M is at least 1.
PowerVector<double> min_power_vector(const ChannelState<double>& ch, const Eigen::VectorXd& flows,
                                     RateModel model = RateModel::exact);

struct NodeSlack {
    std::size_t node;
    double slack;  ///< E_n + best-case inflow - sum of minimum powers
};

struct FeasibilityReport {
    bool rate_feasible = false;
    double spectral_radius = 0.0;
    Eigen::VectorXd min_power;  ///< empty when rate infeasible
    std::vector<NodeSlack> energy_slack;
    bool energy_feasible = false;
    std::vector<std::string> reasons;

    /// Strictly feasible starting point for the barrier solver.
    std::optional<Eigen::VectorXd> witness_log_power;
    std::optional<Eigen::VectorXd> witness_transfer;

    bool feasible() const { return rate_feasible && energy_feasible && witness_log_power.has_value(); }
};

struct FeasibilityOptions {
    double interior_margin = 0.1;  ///< witness powers are at most (1 + margin) p_min
    double rate_margin = 1e-9;     ///< required c_approx - d at the witness
    bool use_transfers = true;
};

/// True when every budget, every rate margin and every x > 0 holds strictly.
bool strictly_feasible(const SlotProblem& problem, const Eigen::VectorXd& log_power,
                       const Eigen::VectorXd& transfer, double rate_margin);

/// Checks the high-SINR rate targets and the energy budgets, and builds a
/// strict-interior witness. Never throws on infeasibility; see `reasons`.
FeasibilityReport check_problem_feasible(const SlotProblem& problem, const FeasibilityOptions& options = {});

class ProblemInfeasible : public Error {
public:
    explicit ProblemInfeasible(FeasibilityReport report);

    const FeasibilityReport& report() const noexcept { return report_; }

private:
    FeasibilityReport report_;
};

}  // namespace ehwsn

#endif  // EHWSN_FEASIBILITY_HPP
