#include "ehwsn/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace ehwsn {

namespace {

std::string join_reasons(const FeasibilityReport& report) {
    std::string out = "slot problem infeasible";
    for (const auto& r : report.reasons) out += "; " + r;
    return out;
}

ErrorCategory category_of(const FeasibilityReport& report) {
    return report.rate_feasible ? ErrorCategory::energy_infeasible : ErrorCategory::rate_infeasible;
}

}  // namespace

ProblemInfeasible::ProblemInfeasible(FeasibilityReport report)
    : Error(category_of(report), join_reasons(report)), report_(std::move(report)) {}

double perron_root(const Eigen::MatrixXd& m, double tol, int max_iterations) {
    const Eigen::Index n = m.rows();
    if (n == 0) return 0.0;
    // The shift keeps the iteration from oscillating on periodic matrices and
    // moves the Perron root by exactly one.
    const Eigen::MatrixXd shifted = m + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    double estimate = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd next = shifted * v;
        const double norm = next.sum();
        next /= norm;
        const double updated = norm - 1.0;
        const bool settled = it > 0 && std::abs(updated - estimate) <= tol * std::max(1.0, updated) &&
                             (next - v).lpNorm<1>() <= std::sqrt(tol);
        estimate = updated;
        v = std::move(next);
        if (settled) break;
    }
    return std::max(estimate, 0.0);
}

RateFixedPoint rate_fixed_point(const ChannelState<double>& ch, const Eigen::VectorXd& flows,
                                RateModel model) {
    ch.validate();
    const Eigen::Index n = ch.links();
    if (flows.size() != n) throw ValidationError("flow vector does not match the channel");
    RateFixedPoint fp{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd(n)};
    for (Eigen::Index l = 0; l < n; ++l) {
        const double target = model == RateModel::exact ? std::expm1(2.0 * flows(l)) : std::exp(2.0 * flows(l));
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k != l) fp.m(l, k) = target * ch.gain(k, l) / ch.gain(l, l);
        }
        fp.b(l) = target * ch.noise(l) / ch.gain(l, l);
    }
    return fp;
}

PowerVector<double> min_power_vector(const ChannelState<double>& ch, const Eigen::VectorXd& flows,
                                     RateModel model) {
    if (!(flows.array() > 0.0).all()) throw ValidationError("minimum power needs positive flows");
    const RateFixedPoint fp = rate_fixed_point(ch, flows, model);
    const double rho = perron_root(fp.m);
    if (rho >= 1.0) throw RateInfeasible(rho);
    const Eigen::Index n = fp.m.rows();
    Eigen::VectorXd p = (Eigen::MatrixXd::Identity(n, n) - fp.m).partialPivLu().solve(fp.b);
    return PowerVector<double>::from_power(std::move(p));
}

bool strictly_feasible(const SlotProblem& problem, const Eigen::VectorXd& log_power,
                       const Eigen::VectorXd& transfer, double rate_margin) {
    if (!log_power.allFinite() || !transfer.allFinite()) return false;
    if (transfer.size() != problem.transfer_count()) return false;
    for (Eigen::Index q = 0; q < transfer.size(); ++q) {
        if (!(transfer(q) > 0.0)) return false;
    }
    for (Eigen::Index l = 0; l < problem.links(); ++l) {
        if (!(capacity_approx(problem.channel, log_power, l) - problem.flows(l) > rate_margin)) return false;
    }
    Eigen::VectorXd budget = problem.energy;
    for (Eigen::Index l = 0; l < problem.links(); ++l) {
        budget(static_cast<Eigen::Index>(problem.owner[static_cast<std::size_t>(l)])) -= std::exp(log_power(l));
    }
    for (Eigen::Index q = 0; q < transfer.size(); ++q) {
        const TransferLink& t = problem.transfers[static_cast<std::size_t>(q)];
        budget(static_cast<Eigen::Index>(t.donor)) -= transfer(q);
        budget(static_cast<Eigen::Index>(t.recipient)) += t.efficiency * transfer(q);
    }
    for (std::size_t n : problem.budget_nodes()) {
        if (!(budget(static_cast<Eigen::Index>(n)) > 0.0)) return false;
    }
    return true;
}

FeasibilityReport check_problem_feasible(const SlotProblem& problem, const FeasibilityOptions& options) {
    problem.validate();
    FeasibilityReport report;
    const RateFixedPoint fp = rate_fixed_point(problem.channel, problem.flows, RateModel::high_sinr);
    report.spectral_radius = perron_root(fp.m);
    if (report.spectral_radius >= 1.0) {
        report.reasons.push_back("rate targets unreachable (spectral radius " +
                                 std::to_string(report.spectral_radius) + ")");
        return report;
    }
    report.rate_feasible = true;
    report.min_power = min_power_vector(problem.channel, problem.flows, RateModel::high_sinr).power();

    const bool transfers = options.use_transfers && !problem.transfers.empty();
    const auto nodes = problem.energy.size();
    Eigen::VectorXd need = Eigen::VectorXd::Zero(nodes);
    for (Eigen::Index l = 0; l < problem.links(); ++l) {
        need(static_cast<Eigen::Index>(problem.owner[static_cast<std::size_t>(l)])) += report.min_power(l);
    }

    // Best case: every donor ships everything it does not need itself.
    Eigen::VectorXd inflow = Eigen::VectorXd::Zero(nodes);
    if (transfers) {
        for (const TransferLink& t : problem.transfers) {
            const auto d = static_cast<Eigen::Index>(t.donor);
            inflow(static_cast<Eigen::Index>(t.recipient)) +=
                t.efficiency * std::max(0.0, problem.energy(d) - need(d));
        }
    }
    report.energy_feasible = true;
    for (std::size_t n : problem.budget_nodes()) {
        const auto i = static_cast<Eigen::Index>(n);
        const double slack = problem.energy(i) + inflow(i) - need(i);
        report.energy_slack.push_back({n, slack});
        if (!(slack > 0.0)) {
            report.energy_feasible = false;
            report.reasons.push_back("node " + problem.node_name(n) + " cannot cover its minimum power (slack " +
                                     std::to_string(slack) + ")");
        }
    }
    if (!report.energy_feasible) return report;

    std::vector<int> out_degree(static_cast<std::size_t>(nodes), 0);
    for (const TransferLink& t : problem.transfers) ++out_degree[t.donor];

    const std::vector<double> fractions = transfers ? std::vector<double>{0.5, 0.9, 0.99} : std::vector<double>{0.0};
    for (double fraction : fractions) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(transfers ? problem.transfer_count() : 0);
        Eigen::VectorXd budget = problem.energy;
        for (Eigen::Index q = 0; q < x.size(); ++q) {
            const TransferLink& t = problem.transfers[static_cast<std::size_t>(q)];
            const auto d = static_cast<Eigen::Index>(t.donor);
            const double spare = problem.energy(d) - (1.0 + options.interior_margin) * need(d);
            x(q) = spare > 0.0 ? fraction * spare / out_degree[t.donor] : 1e-9 * std::max(1.0, problem.energy(d));
            budget(d) -= x(q);
            budget(static_cast<Eigen::Index>(t.recipient)) += t.efficiency * x(q);
        }
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t n : problem.budget_nodes()) {
            const auto i = static_cast<Eigen::Index>(n);
            if (need(i) > 0.0) {
                ratio = std::min(ratio, budget(i) / need(i));
            } else if (!(budget(i) > 0.0)) {
                ratio = 0.0;
            }
        }
        if (!(ratio > 1.0)) continue;
        const double scale = std::min(1.0 + options.interior_margin, std::sqrt(ratio));
        Eigen::VectorXd log_power = (scale * report.min_power).array().log().matrix();
        const bool ok = transfers ? strictly_feasible(problem, log_power, x, options.rate_margin)
                                  : strictly_feasible(problem.without_transfers(), log_power, x, options.rate_margin);
        if (ok) {
            report.witness_log_power = std::move(log_power);
            report.witness_transfer = std::move(x);
            return report;
        }
    }
    report.reasons.push_back("no strictly feasible point found near the minimum powers");
    return report;
}

}  // namespace ehwsn
