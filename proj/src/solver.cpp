#include "ehwsn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "barrier.hpp"

namespace ehwsn {

namespace {

/// Variables z = [ptilde (L), x (Q)]. Constraints in order: one energy
/// budget per budget node, one rate margin per link, x_q > 0 per transfer.
class DelayProgram final : public detail::ConvexProgram {
public:
    DelayProgram(const SlotProblem& problem, double rate_margin, double transfer_penalty)
        : problem_(problem),
          budget_nodes_(problem.budget_nodes()),
          rate_margin_(rate_margin),
          transfer_penalty_(transfer_penalty) {}

    Eigen::Index links() const { return problem_.links(); }
    Eigen::Index transfers() const { return problem_.transfer_count(); }
    Eigen::Index budgets() const { return static_cast<Eigen::Index>(budget_nodes_.size()); }
    const std::vector<std::size_t>& budget_nodes() const { return budget_nodes_; }

    Eigen::Index dim() const override { return links() + transfers(); }
    Eigen::Index constraint_count() const override { return budgets() + links() + transfers(); }

    double objective(const Eigen::VectorXd& z, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const override {
        const Eigen::VectorXd pt = z.head(links());
        const Eigen::VectorXd x = z.tail(transfers());
        const double f = objective_logdomain(problem_, pt) + transfer_penalty_ * x.sum();
        if (grad) {
            grad->setZero(dim());
            grad->head(links()) = gradient_logdomain(problem_, pt);
            grad->tail(transfers()).setConstant(transfer_penalty_);
        }
        if (hess) {
            hess->setZero(dim(), dim());
            hess->topLeftCorner(links(), links()) = hessian_logdomain(problem_, pt);
        }
        return f;
    }

    void constraints(const Eigen::VectorXd& z, Eigen::VectorXd& values, Eigen::MatrixXd* jacobian) const override {
        const Eigen::Index nl = links();
        const Eigen::Index nb = budgets();
        const auto& ch = problem_.channel;
        values.resize(constraint_count());
        if (jacobian) jacobian->setZero(constraint_count(), dim());

        for (Eigen::Index b = 0; b < nb; ++b) values(b) = -problem_.energy(static_cast<Eigen::Index>(budget_nodes_[b]));
        for (Eigen::Index l = 0; l < nl; ++l) {
            const Eigen::Index b = budget_row(problem_.owner[static_cast<std::size_t>(l)]);
            const double p = std::exp(z(l));
            values(b) += p;
            if (jacobian) (*jacobian)(b, l) = p;
        }
        for (Eigen::Index q = 0; q < transfers(); ++q) {
            const TransferLink& t = problem_.transfers[static_cast<std::size_t>(q)];
            const double x = z(nl + q);
            const Eigen::Index donor = budget_row(t.donor);
            values(donor) += x;
            if (jacobian) (*jacobian)(donor, nl + q) += 1.0;
            const Eigen::Index recipient = budget_row(t.recipient);
            if (recipient >= 0) {
                values(recipient) -= t.efficiency * x;
                if (jacobian) (*jacobian)(recipient, nl + q) -= t.efficiency;
            }
            values(nb + nl + q) = -x;
            if (jacobian) (*jacobian)(nb + nl + q, nl + q) = -1.0;
        }

        const Eigen::VectorXd pt = z.head(nl);
        const Eigen::VectorXd p = pt.array().exp().matrix();
        for (Eigen::Index l = 0; l < nl; ++l) {
            values(nb + l) = problem_.flows(l) + rate_margin_ - capacity_approx(ch, pt, l);
            if (jacobian) {
                const double heard = interference_plus_noise(ch, p, l);
                for (Eigen::Index k = 0; k < nl; ++k) {
                    (*jacobian)(nb + l, k) = k == l ? -0.5 : 0.5 * ch.gain(k, l) * p(k) / heard;
                }
            }
        }
    }

    void add_constraint_curvature(const Eigen::VectorXd& z, const Eigen::VectorXd& weights,
                                  Eigen::MatrixXd& hess) const override {
        const Eigen::Index nl = links();
        const Eigen::Index nb = budgets();
        const auto& ch = problem_.channel;
        for (Eigen::Index l = 0; l < nl; ++l) {
            const Eigen::Index b = budget_row(problem_.owner[static_cast<std::size_t>(l)]);
            hess(l, l) += weights(b) * std::exp(z(l));
        }
        const Eigen::VectorXd pt = z.head(nl);
        const Eigen::VectorXd p = pt.array().exp().matrix();
        Eigen::VectorXd share(nl);
        for (Eigen::Index l = 0; l < nl; ++l) {
            const double heard = interference_plus_noise(ch, p, l);
            for (Eigen::Index k = 0; k < nl; ++k) share(k) = k == l ? 0.0 : ch.gain(k, l) * p(k) / heard;
            const double w = 0.5 * weights(nb + l);
            hess.topLeftCorner(nl, nl).diagonal() += w * share;
            hess.topLeftCorner(nl, nl).noalias() -= w * share * share.transpose();
        }
    }

    Eigen::Index budget_row(std::size_t node) const {
        auto it = std::lower_bound(budget_nodes_.begin(), budget_nodes_.end(), node);
        if (it == budget_nodes_.end() || *it != node) return -1;
        return static_cast<Eigen::Index>(it - budget_nodes_.begin());
    }

private:
    const SlotProblem& problem_;
    std::vector<std::size_t> budget_nodes_;
    double rate_margin_;
    double transfer_penalty_;
};

/// With powers frozen, the least total transfer that keeps every budget
/// satisfied: min sum(x) s.t. budgets, x > 0.
class TransferPolish final : public detail::ConvexProgram {
public:
    TransferPolish(const SlotProblem& problem, const Eigen::VectorXd& power)
        : problem_(problem), nodes_(problem.budget_nodes()) {
        spend_ = Eigen::VectorXd::Zero(problem.energy.size());
        for (Eigen::Index l = 0; l < problem.links(); ++l) {
            spend_(static_cast<Eigen::Index>(problem.owner[static_cast<std::size_t>(l)])) += power(l);
        }
    }

    Eigen::Index dim() const override { return problem_.transfer_count(); }
    Eigen::Index constraint_count() const override {
        return static_cast<Eigen::Index>(nodes_.size()) + problem_.transfer_count();
    }

    double objective(const Eigen::VectorXd& z, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const override {
        if (grad) grad->setOnes(dim());
        if (hess) hess->setZero(dim(), dim());
        return z.sum();
    }

    void constraints(const Eigen::VectorXd& z, Eigen::VectorXd& values, Eigen::MatrixXd* jacobian) const override {
        const auto nb = static_cast<Eigen::Index>(nodes_.size());
        values.resize(constraint_count());
        if (jacobian) jacobian->setZero(constraint_count(), dim());
        for (Eigen::Index b = 0; b < nb; ++b) {
            const auto n = static_cast<Eigen::Index>(nodes_[static_cast<std::size_t>(b)]);
            values(b) = spend_(n) - problem_.energy(n);
        }
        for (Eigen::Index q = 0; q < dim(); ++q) {
            const TransferLink& t = problem_.transfers[static_cast<std::size_t>(q)];
            for (Eigen::Index b = 0; b < nb; ++b) {
                const std::size_t n = nodes_[static_cast<std::size_t>(b)];
                double coeff = 0.0;
                if (n == t.donor) coeff += 1.0;
                if (n == t.recipient) coeff -= t.efficiency;
                values(b) += coeff * z(q);
                if (jacobian) (*jacobian)(b, q) = coeff;
            }
            values(nb + q) = -z(q);
            if (jacobian) (*jacobian)(nb + q, q) = -1.0;
        }
    }

    void add_constraint_curvature(const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::MatrixXd&) const override {}

private:
    const SlotProblem& problem_;
    std::vector<std::size_t> nodes_;
    Eigen::VectorXd spend_;
};

std::string sinr_warning(const SlotProblem& problem, Eigen::Index l, double value, double threshold) {
    std::ostringstream os;
    os << "link " << problem.link_name(l) << " SINR " << value << " below high-SINR threshold " << threshold;
    return os.str();
}

Solution solve(const SlotProblem& problem, const SolverOptions& options, bool with_transfer,
               Eigen::VectorXd z0) {
    const DelayProgram program(problem, options.rate_margin, with_transfer ? options.transfer_penalty : 0.0);
    detail::BarrierResult run = detail::minimize_barrier(program, std::move(z0), options.barrier);

    const Eigen::Index nl = problem.links();
    const Eigen::Index nq = program.transfers();
    const Eigen::Index nb = program.budgets();

    Solution sol;
    sol.transfers_enabled = with_transfer;
    sol.mu = run.mu;
    sol.duality_gap = static_cast<double>(program.constraint_count()) * run.mu;
    sol.iterations = run.iterations;
    sol.converged = run.converged;
    sol.termination = run.termination;
    sol.trace = std::move(run.trace);

    const Eigen::VectorXd& y = run.multipliers;
    sol.lambda = Eigen::VectorXd::Zero(problem.energy.size());
    for (Eigen::Index b = 0; b < nb; ++b) {
        sol.lambda(static_cast<Eigen::Index>(program.budget_nodes()[static_cast<std::size_t>(b)])) = y(b);
    }
    sol.rate_multiplier = y.segment(nb, nl);
    sol.beta = Eigen::VectorXd::Zero(nl);
    sol.gamma = Eigen::VectorXd::Zero(problem.transfer_count());
    sol.transfer = Eigen::VectorXd::Zero(problem.transfer_count());
    if (with_transfer) {
        sol.gamma = y.tail(nq);
        sol.transfer = run.z.tail(nq);
    }

    evaluate_links(problem, run.z.head(nl), sol);

    if (with_transfer && options.polish_transfers) {
        const TransferPolish polish(problem, sol.power);
        BarrierOptions lp = options.barrier;
        lp.initial_mu = 1e-3;
        lp.gap_tolerance = 1e-13 * std::max(1.0, sol.transfer.sum());
        detail::BarrierResult tidy = detail::minimize_barrier(polish, sol.transfer, lp);
        if (tidy.converged && strictly_feasible(problem, sol.log_power, tidy.z, 0.0)) sol.transfer = tidy.z;
    }

    for (Eigen::Index l = 0; l < nl; ++l) {
        if (sol.sinr(l) < options.high_sinr_threshold) {
            sol.warnings.push_back(sinr_warning(problem, l, sol.sinr(l), options.high_sinr_threshold));
        }
    }
    return sol;
}

}  // namespace

void evaluate_links(const SlotProblem& problem, const Eigen::VectorXd& log_power, Solution& out) {
    const auto& ch = problem.channel;
    const Eigen::Index nl = problem.links();
    out.log_power = log_power;
    out.power = log_power.array().exp().matrix();
    out.sinr.resize(nl);
    out.capacity_approx.resize(nl);
    out.capacity_exact.resize(nl);
    out.delay.resize(nl);
    out.objective = 0.0;
    for (Eigen::Index l = 0; l < nl; ++l) {
        out.sinr(l) = sinr(ch, out.power, l);
        out.capacity_approx(l) = capacity_approx(ch, out.log_power, l);
        out.capacity_exact(l) = capacity_exact(ch, out.power, l);
        const double margin = out.capacity_approx(l) - problem.flows(l);
        out.delay(l) = margin > 0.0 ? problem.flows(l) / margin : std::numeric_limits<double>::infinity();
        out.objective += out.delay(l);
    }
}

Solution solve_no_transfer(const SlotProblem& problem, const SolverOptions& options,
                           const std::optional<Eigen::VectorXd>& initial_log_power) {
    const SlotProblem plain = problem.without_transfers();
    Eigen::VectorXd z0;
    if (initial_log_power) {
        plain.validate();
        if (!strictly_feasible(plain, *initial_log_power, Eigen::VectorXd(), options.rate_margin)) {
            throw ValidationError("initial point is not strictly feasible");
        }
        z0 = *initial_log_power;
    } else {
        FeasibilityOptions fopt;
        fopt.rate_margin = options.rate_margin;
        fopt.use_transfers = false;
        FeasibilityReport report = check_problem_feasible(plain, fopt);
        if (!report.feasible()) throw ProblemInfeasible(std::move(report));
        z0 = *report.witness_log_power;
    }
    Solution sol = solve(plain, options, false, std::move(z0));
    // Report in the caller's problem shape: transfers present but unused.
    sol.transfer = Eigen::VectorXd::Zero(problem.transfer_count());
    sol.gamma = Eigen::VectorXd::Zero(problem.transfer_count());
    return sol;
}

Solution solve_with_transfer(const SlotProblem& problem, const SolverOptions& options,
                             const std::optional<InitialPoint>& initial) {
    if (problem.transfers.empty()) throw ValidationError("solve_with_transfer needs at least one energy link");
    Eigen::VectorXd z0(problem.links() + problem.transfer_count());
    if (initial) {
        problem.validate();
        if (!strictly_feasible(problem, initial->log_power, initial->transfer, options.rate_margin)) {
            throw ValidationError("initial point is not strictly feasible");
        }
        z0 << initial->log_power, initial->transfer;
    } else {
        FeasibilityOptions fopt;
        fopt.rate_margin = options.rate_margin;
        FeasibilityReport report = check_problem_feasible(problem, fopt);
        if (!report.feasible()) throw ProblemInfeasible(std::move(report));
        z0 << *report.witness_log_power, *report.witness_transfer;
    }
    return solve(problem, options, true, std::move(z0));
}

double KktReport::max_stationarity() const {
    double m = 0.0;
    if (stationarity_power.size()) m = std::max(m, stationarity_power.lpNorm<Eigen::Infinity>());
    if (stationarity_transfer.size()) m = std::max(m, stationarity_transfer.lpNorm<Eigen::Infinity>());
    return m;
}

double KktReport::max_slackness() const {
    double m = 0.0;
    for (const Eigen::VectorXd* v : {&slackness_budget, &slackness_rate, &slackness_transfer}) {
        if (v->size()) m = std::max(m, v->lpNorm<Eigen::Infinity>());
    }
    return m;
}

KktReport kkt_report(const SlotProblem& problem, const Solution& solution) {
    const Eigen::Index nl = problem.links();
    const Eigen::Index nq = problem.transfer_count();
    const bool transfers = solution.transfers_enabled && nq > 0;
    const auto& p = solution.power;
    const Eigen::VectorXd x = transfers ? solution.transfer : Eigen::VectorXd::Zero(nq);
    const Eigen::VectorXd grad = gradient_logdomain(problem, solution.log_power);

    KktReport report;
    report.stationarity_power.resize(nl);
    for (Eigen::Index l = 0; l < nl; ++l) {
        report.stationarity_power(l) =
            grad(l) + p(l) * solution.lambda(static_cast<Eigen::Index>(problem.owner[static_cast<std::size_t>(l)]));
    }
    report.stationarity_transfer = Eigen::VectorXd::Zero(transfers ? nq : 0);
    report.slackness_transfer = Eigen::VectorXd::Zero(transfers ? nq : 0);
    if (transfers) {
        for (Eigen::Index q = 0; q < nq; ++q) {
            const TransferLink& t = problem.transfers[static_cast<std::size_t>(q)];
            // The tie-break penalty is part of the solved objective; the
            // residual is reported against the delay-only Lagrangian.
            report.stationarity_transfer(q) = solution.lambda(static_cast<Eigen::Index>(t.donor)) -
                                              t.efficiency * solution.lambda(static_cast<Eigen::Index>(t.recipient)) -
                                              solution.gamma(q);
            report.slackness_transfer(q) = solution.gamma(q) * x(q);
        }
    }

    // Budget slack at the reported point.
    const std::vector<std::size_t> nodes =
        transfers ? problem.budget_nodes() : problem.without_transfers().budget_nodes();
    Eigen::VectorXd slack = problem.energy;
    for (Eigen::Index l = 0; l < nl; ++l) slack(static_cast<Eigen::Index>(problem.owner[static_cast<std::size_t>(l)])) -= p(l);
    if (transfers) {
        for (Eigen::Index q = 0; q < nq; ++q) {
            const TransferLink& t = problem.transfers[static_cast<std::size_t>(q)];
            slack(static_cast<Eigen::Index>(t.donor)) -= x(q);
            slack(static_cast<Eigen::Index>(t.recipient)) += t.efficiency * x(q);
        }
    }
    report.slackness_budget.resize(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto n = static_cast<Eigen::Index>(nodes[i]);
        report.slackness_budget(static_cast<Eigen::Index>(i)) = solution.lambda(n) * std::abs(slack(n));
    }

    report.slackness_rate.resize(nl);
    for (Eigen::Index l = 0; l < nl; ++l) {
        report.slackness_rate(l) = solution.beta(l) * (solution.capacity_approx(l) - problem.flows(l));
    }
    report.lemma1_max_beta = solution.rate_multiplier.size() ? solution.rate_multiplier.maxCoeff() : 0.0;
    if (solution.beta.size()) report.lemma1_max_beta = std::max(report.lemma1_max_beta, solution.beta.maxCoeff());

    // dDelay/dp_l = grad_l / p_l must agree across the links of one node.
    std::vector<std::vector<Eigen::Index>> by_owner(static_cast<std::size_t>(problem.energy.size()));
    for (Eigen::Index l = 0; l < nl; ++l) by_owner[problem.owner[static_cast<std::size_t>(l)]].push_back(l);
    for (const auto& group : by_owner) {
        if (group.size() < 2) continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Eigen::Index l : group) {
            lo = std::min(lo, grad(l) / p(l));
            hi = std::max(hi, grad(l) / p(l));
        }
        report.lemma2_max_spread = std::max(report.lemma2_max_spread.value_or(0.0), hi - lo);
    }

    report.lambda_residual = Eigen::VectorXd::Zero(nl);
    for (Eigen::Index l = 0; l < nl; ++l) {
        const auto n = static_cast<Eigen::Index>(problem.owner[static_cast<std::size_t>(l)]);
        const bool tight = std::abs(slack(n)) <= 1e-6 * std::max(1.0, problem.energy(n));
        if (tight) report.lambda_residual(l) = std::abs(-grad(l) / p(l) - solution.lambda(n));
    }

    report.min_dual = std::min({solution.lambda.size() ? solution.lambda.minCoeff() : 0.0,
                                solution.beta.size() ? solution.beta.minCoeff() : 0.0,
                                solution.gamma.size() ? solution.gamma.minCoeff() : 0.0});
    return report;
}

}  // namespace ehwsn
