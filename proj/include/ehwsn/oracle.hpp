#ifndef EHWSN_ORACLE_HPP
#define EHWSN_ORACLE_HPP

#include <cstddef>

#include <Eigen/Core>

#include "ehwsn/channel.hpp"
#include "ehwsn/problem.hpp"

namespace ehwsn {

// Exhaustive search and convexity probes for tiny slot problems. These are
// test instruments, independent of the interior-point solver.

struct GridSpec {
    int power_points = 12;      ///< log-spaced samples per link power
    int transfer_points = 12;   ///< linear samples per transfer in [0, E_donor]
    int refinement_halvings = 20;
};

struct OracleResult {
    Eigen::VectorXd log_power;
    Eigen::VectorXd transfer;
    double value = 0.0;
    std::size_t evaluated = 0;
    std::size_t feasible = 0;
};

/// Grid search over powers (between the high-SINR minimum powers and each
/// owner's best-case energy) and transfers, then coordinate refinement.
/// Transfers are searched only when `with_transfer` is set. Limited to three
/// links and two transfer links.
OracleResult brute_force_solve(const SlotProblem& problem, const GridSpec& grid, bool with_transfer);

enum class ProbeDomain {
    log_power,  ///< high-SINR objective over (ptilde, x)
    raw_power,  ///< exact-rate objective over raw powers p
};

/// Largest f(midpoint) - (f(a) + f(b)) / 2 over `pairs` random strictly
/// feasible pairs. Nonpositive up to round-off for a convex objective.
double convexity_probe(const SlotProblem& problem, int pairs, Rng& rng,
                       ProbeDomain domain = ProbeDomain::log_power);

}  // namespace ehwsn

#endif  // EHWSN_ORACLE_HPP
