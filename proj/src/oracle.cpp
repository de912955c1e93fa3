#include "ehwsn/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "ehwsn/feasibility.hpp"

namespace ehwsn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SearchSpace {
    Eigen::VectorXd lower;  // ptilde bounds then x bounds
    Eigen::VectorXd upper;
    Eigen::Index links = 0;
    Eigen::Index transfers = 0;
};

/// Per-link energy ceiling: own energy plus everything donors could send.
Eigen::VectorXd power_ceiling(const SlotProblem& problem, bool with_transfer) {
    Eigen::VectorXd cap(problem.links());
    for (Eigen::Index l = 0; l < problem.links(); ++l) {
        const std::size_t n = problem.owner[static_cast<std::size_t>(l)];
        double e = problem.energy(static_cast<Eigen::Index>(n));
        if (with_transfer) {
            for (const TransferLink& t : problem.transfers) {
                if (t.recipient == n) e += t.efficiency * problem.energy(static_cast<Eigen::Index>(t.donor));
            }
        }
        cap(l) = e;
    }
    return cap;
}

SearchSpace search_space(const SlotProblem& problem, bool with_transfer, RateModel model) {
    SearchSpace s;
    s.links = problem.links();
    s.transfers = with_transfer ? problem.transfer_count() : 0;
    const Eigen::VectorXd floor = min_power_vector(problem.channel, problem.flows, model).power();
    const Eigen::VectorXd cap = power_ceiling(problem, with_transfer);
    s.lower.resize(s.links + s.transfers);
    s.upper.resize(s.links + s.transfers);
    for (Eigen::Index l = 0; l < s.links; ++l) {
        s.lower(l) = std::log(floor(l)) + 1e-9;
        s.upper(l) = std::log(cap(l));
    }
    for (Eigen::Index q = 0; q < s.transfers; ++q) {
        s.lower(s.links + q) = 0.0;
        s.upper(s.links + q) = problem.energy(static_cast<Eigen::Index>(problem.transfers[static_cast<std::size_t>(q)].donor));
    }
    return s;
}

bool budgets_hold(const SlotProblem& problem, const Eigen::VectorXd& power, const Eigen::VectorXd& x) {
    Eigen::VectorXd left = problem.energy;
    for (Eigen::Index l = 0; l < problem.links(); ++l) {
        left(static_cast<Eigen::Index>(problem.owner[static_cast<std::size_t>(l)])) -= power(l);
    }
    for (Eigen::Index q = 0; q < x.size(); ++q) {
        if (x(q) < 0.0) return false;
        const TransferLink& t = problem.transfers[static_cast<std::size_t>(q)];
        left(static_cast<Eigen::Index>(t.donor)) -= x(q);
        left(static_cast<Eigen::Index>(t.recipient)) += t.efficiency * x(q);
    }
    for (std::size_t n : problem.budget_nodes()) {
        if (left(static_cast<Eigen::Index>(n)) < -1e-12 * std::max(1.0, problem.energy(static_cast<Eigen::Index>(n)))) {
            return false;
        }
    }
    return true;
}

/// Delay at z = [ptilde, x]; +infinity when any constraint fails.
double evaluate(const SlotProblem& problem, const SearchSpace& s, const Eigen::VectorXd& z) {
    const Eigen::VectorXd pt = z.head(s.links);
    const Eigen::VectorXd x = z.tail(s.transfers);
    if (!budgets_hold(problem, pt.array().exp().matrix(), x)) return kInf;
    return objective_logdomain(problem, pt);
}

}  // namespace

OracleResult brute_force_solve(const SlotProblem& problem, const GridSpec& grid, bool with_transfer) {
    problem.validate();
    if (problem.links() > 3 || (with_transfer && problem.transfer_count() > 2)) {
        throw ValidationError("brute force oracle is limited to 3 links and 2 energy links");
    }
    if (grid.power_points < 2 || (with_transfer && problem.transfer_count() > 0 && grid.transfer_points < 2)) {
        throw ValidationError("grid needs at least two points per dimension");
    }
    const SearchSpace s = search_space(problem, with_transfer, RateModel::high_sinr);
    const Eigen::Index dims = s.links + s.transfers;
    if (!((s.upper.head(s.links) - s.lower.head(s.links)).array() > 0.0).all()) {
        throw ValidationError("oracle: empty feasible grid (minimum power exceeds available energy)");
    }

    std::vector<int> counts(static_cast<std::size_t>(dims));
    Eigen::VectorXd spacing(dims);
    for (Eigen::Index i = 0; i < dims; ++i) {
        counts[static_cast<std::size_t>(i)] = i < s.links ? grid.power_points : grid.transfer_points;
        spacing(i) = (s.upper(i) - s.lower(i)) / (counts[static_cast<std::size_t>(i)] - 1);
    }

    OracleResult best;
    best.value = kInf;
    std::vector<int> index(static_cast<std::size_t>(dims), 0);
    Eigen::VectorXd z(dims);
    Eigen::VectorXd best_z;
    while (true) {
        for (Eigen::Index i = 0; i < dims; ++i) z(i) = s.lower(i) + spacing(i) * index[static_cast<std::size_t>(i)];
        const double v = evaluate(problem, s, z);
        ++best.evaluated;
        if (std::isfinite(v)) {
            ++best.feasible;
            if (v < best.value) {
                best.value = v;
                best_z = z;
            }
        }
        // Odometer over the grid; the first dimension varies slowest.
        Eigen::Index d = dims - 1;
        while (d >= 0 && ++index[static_cast<std::size_t>(d)] == counts[static_cast<std::size_t>(d)]) {
            index[static_cast<std::size_t>(d)] = 0;
            --d;
        }
        if (d < 0) break;
    }
    if (!std::isfinite(best.value)) throw ValidationError("oracle: empty feasible grid");

    // Pattern search over every lattice neighbour, so diagonal valleys are
    // followed as well as axis-aligned ones.
    std::vector<Eigen::VectorXd> moves;
    std::vector<int> digit(static_cast<std::size_t>(dims), -1);
    while (true) {
        Eigen::VectorXd m(dims);
        for (Eigen::Index i = 0; i < dims; ++i) m(i) = digit[static_cast<std::size_t>(i)];
        if (m.cwiseAbs().sum() > 0) moves.push_back(std::move(m));
        Eigen::Index d = dims - 1;
        while (d >= 0 && ++digit[static_cast<std::size_t>(d)] == 2) {
            digit[static_cast<std::size_t>(d)] = -1;
            --d;
        }
        if (d < 0) break;
    }

    Eigen::VectorXd step = spacing;
    for (int h = 0; h < grid.refinement_halvings; ++h) {
        for (int sweep = 0; sweep < 100; ++sweep) {
            bool improved = false;
            for (const Eigen::VectorXd& m : moves) {
                Eigen::VectorXd trial = best_z + m.cwiseProduct(step);
                const double v = evaluate(problem, s, trial);
                ++best.evaluated;
                if (v < best.value) {
                    best.value = v;
                    best_z = std::move(trial);
                    improved = true;
                }
            }
            if (!improved) break;
        }
        step /= 2.0;
    }

    best.log_power = best_z.head(s.links);
    best.transfer = Eigen::VectorXd::Zero(problem.transfer_count());
    if (s.transfers) best.transfer = best_z.tail(s.transfers);
    return best;
}

double convexity_probe(const SlotProblem& problem, int pairs, Rng& rng, ProbeDomain domain) {
    problem.validate();
    const bool raw = domain == ProbeDomain::raw_power;
    const bool with_transfer = !raw && !problem.transfers.empty();
    const SearchSpace s = search_space(problem, with_transfer, raw ? RateModel::exact : RateModel::high_sinr);
    const Eigen::Index dims = s.links + s.transfers;

    // Raw powers are sampled uniformly on [p_min, cap] rather than in logs.
    Eigen::VectorXd lower = s.lower;
    Eigen::VectorXd upper = s.upper;
    if (raw) {
        lower.head(s.links) = lower.head(s.links).array().exp().matrix();
        upper.head(s.links) = upper.head(s.links).array().exp().matrix();
    }

    auto value = [&](const Eigen::VectorXd& z) {
        if (!raw) return evaluate(problem, s, z);
        const Eigen::VectorXd p = z.head(s.links);
        if (!budgets_hold(problem, p, Eigen::VectorXd())) return kInf;
        return delay_exact_power(problem.flows, problem.channel, p);
    };

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&]() {
        Eigen::VectorXd z(dims);
        for (int attempt = 0; attempt < 100000; ++attempt) {
            for (Eigen::Index i = 0; i < dims; ++i) z(i) = lower(i) + (upper(i) - lower(i)) * unit(rng);
            if (std::isfinite(value(z))) return z;
        }
        throw ValidationError("convexity probe: could not sample a feasible point");
    };

    double worst = -kInf;
    for (int k = 0; k < pairs; ++k) {
        const Eigen::VectorXd a = draw();
        const Eigen::VectorXd b = draw();
        const double fa = value(a);
        const double fb = value(b);
        const double fm = value(0.5 * (a + b));
        worst = std::max(worst, fm - 0.5 * (fa + fb));
    }
    return worst;
}

}  // namespace ehwsn
