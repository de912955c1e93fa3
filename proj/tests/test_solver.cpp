#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ehwsn/feasibility.hpp"
#include "ehwsn/oracle.hpp"
#include "ehwsn/solver.hpp"
#include "fixtures.hpp"

namespace ehwsn {
namespace {

SlotProblem single_link(double energy = 10.0) {
    SlotProblem p;
    p.flows = Eigen::VectorXd::Constant(1, 0.8752);
    p.channel = {Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Constant(1, 1e-5)};
    p.owner = {0};
    p.energy = Eigen::VectorXd::Constant(1, energy);
    return p;
}

/// Two links close to their rate limit, so delays react strongly to power.
SlotProblem tight_pair() {
    SlotProblem p;
    p.flows = Eigen::Vector2d(1.8, 1.5);
    p.channel.gain.resize(2, 2);
    p.channel.gain << 1.0, 0.01, 0.01, 1.0;
    p.channel.noise = Eigen::VectorXd::Constant(2, 1e-5);
    p.owner = {0, 1};
    p.energy = Eigen::Vector2d(1e-3, 2e-3);
    return p;
}

SlotProblem coupled_pair(double cross) {
    SlotProblem p;
    p.flows = Eigen::Vector2d(0.3, 0.4);
    p.channel.gain.resize(2, 2);
    p.channel.gain << 1.0, cross, cross, 1.0;
    p.channel.noise = Eigen::VectorXd::Constant(2, 1e-5);
    p.owner = {0, 1};
    p.energy = Eigen::Vector2d(8.0, 5.0);
    return p;
}

void expect_certified(const SlotProblem& p, const Solution& s) {
    const KktReport k = kkt_report(p, s);
    EXPECT_LE(k.max_stationarity(), 1e-5);
    EXPECT_LE(k.max_slackness(), 1e-5);
    EXPECT_TRUE(s.beta.isZero());
    EXPECT_LE(k.lemma1_max_beta, 1e-6);
    EXPECT_GE(k.min_dual, -1e-9);
    EXPECT_TRUE(s.converged) << s.termination;
}

TEST(SolveNoTransfer, SingleLinkSaturates) {
    const SlotProblem p = single_link();
    const Solution s = solve_no_transfer(p);
    EXPECT_NEAR(s.power(0), 10.0, 1e-4);
    EXPECT_LE(s.power(0), 10.0);
    expect_certified(p, s);
}

TEST(SolveNoTransfer, OrthogonalReferenceSlotSaturatesEveryBudget) {
    const SlotProblem p = testing::reference_slot_problem();
    const Solution s = solve_no_transfer(p);
    for (Eigen::Index l = 0; l < 5; ++l) EXPECT_NEAR(s.power(l), p.energy(l), 1e-3);
    EXPECT_EQ(s.transfer.size(), 5);
    EXPECT_EQ(s.transfer.sum(), 0.0);
    expect_certified(p, s);
}

TEST(SolveNoTransfer, HighCouplingPairAgreesWithOracle) {
    const SlotProblem p = coupled_pair(0.3);
    const Solution s = solve_no_transfer(p);
    const OracleResult o = brute_force_solve(p, GridSpec{}, false);
    EXPECT_LE(s.objective, o.value + 1e-3 * (1.0 + std::abs(s.objective)));
    EXPECT_LE(o.value, s.objective + 1e-3 * (1.0 + std::abs(s.objective)));
    expect_certified(p, s);
}

TEST(SolveNoTransfer, ObjectiveMatchesOwnSinrs) {
    const SlotProblem p = testing::reference_slot_problem(false);
    const Solution s = solve_no_transfer(p);
    double recomputed = 0.0;
    for (Eigen::Index l = 0; l < 5; ++l) recomputed += p.flows(l) / (0.5 * std::log(s.sinr(l)) - p.flows(l));
    EXPECT_NEAR(recomputed, s.objective, 1e-8);
}

TEST(SolveWithTransfer, OrthogonalReferenceSlotDrainsDonors) {
    const SlotProblem p = testing::reference_slot_problem();
    const Solution s = solve_with_transfer(p);
    const double power[] = {15.6, 16.0, 11.8, 10.4, 12.6};
    const double sent[] = {11, 10, 8, 4, 6};
    for (Eigen::Index l = 0; l < 5; ++l) {
        EXPECT_NEAR(s.power(l), power[l], 1e-3);
        EXPECT_NEAR(s.transfer(l), sent[l], 1e-3);
    }
    expect_certified(p, s);
}

TEST(SolveWithTransfer, ZeroEfficiencyLinkCarriesNothing) {
    SlotProblem p = testing::reference_slot_problem();
    p.transfers[2].efficiency = 0.0;
    const Solution s = solve_with_transfer(p);
    EXPECT_LE(s.transfer(2), 1e-6);
    EXPECT_NEAR(s.power(2), p.energy(2), 1e-3);
    EXPECT_NEAR(s.transfer(0), 11.0, 1e-3);
}

TEST(SolveWithTransfer, UselessDonorIsPinnedNearZero) {
    // Interference channel: delay barely depends on the power scale, so
    // most transfers are useless and the tie-break keeps them minimal.
    const SlotProblem p = testing::reference_slot_problem(false);
    const Solution on = solve_with_transfer(p);
    const Solution off = solve_no_transfer(p);
    EXPECT_LE(on.objective, off.objective + 1e-9);
    EXPECT_GE(on.transfer.minCoeff(), 0.0);
    expect_certified(p, on);
}

TEST(SolveWithTransfer, DominatesNoTransferOnRandomInstances) {
    Rng rng(61);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index links = 1 + static_cast<Eigen::Index>(rng() % 3);
        SlotProblem p = testing::random_problem(rng, links, 1 + static_cast<Eigen::Index>(rng() % 2), 0.05);
        if (trial % 2) p = p.orthogonal();
        const Solution on = solve_with_transfer(p);
        const Solution off = solve_no_transfer(p);
        EXPECT_LE(on.objective, off.objective + 1e-9) << "trial " << trial;
        expect_certified(p, on);
        expect_certified(p, off);
    }
}

TEST(SolveWithTransfer, NeedsEnergyLinks) {
    EXPECT_THROW(solve_with_transfer(single_link()), ValidationError);
}

TEST(Solver, UnderestimateIsSafeForExactRates) {
    Rng rng(62);
    for (int trial = 0; trial < 30; ++trial) {
        const SlotProblem p = testing::random_problem(rng, 3, 1, 0.05);
        const Solution s = solve_with_transfer(p);
        double exact = 0.0;
        for (Eigen::Index l = 0; l < 3; ++l) {
            EXPECT_GT(s.capacity_exact(l), p.flows(l));
            EXPECT_GE(s.capacity_exact(l), s.capacity_approx(l));
            exact += p.flows(l) / (s.capacity_exact(l) - p.flows(l));
        }
        EXPECT_LE(exact, s.objective);
    }
}

TEST(Solver, RestartsAgree) {
    Rng rng(63);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const SlotProblem p = testing::random_problem(rng, 3, 2, 0.05);
        const Solution ref = solve_with_transfer(p);
        const Eigen::VectorXd base =
            min_power_vector(p.channel, p.flows, RateModel::high_sinr).power().array().log().matrix();
        int restarts = 0;
        while (restarts < 10) {
            InitialPoint start{base.array() + std::log(1.0 + 5.0 * u(rng)), Eigen::VectorXd(2)};
            for (Eigen::Index q = 0; q < 2; ++q) start.transfer(q) = 0.4 * u(rng) * p.energy(p.transfers[q].donor);
            if (!strictly_feasible(p, start.log_power, start.transfer, 1e-9)) continue;
            const Solution s = solve_with_transfer(p, {}, start);
            EXPECT_NEAR(s.objective, ref.objective, 1e-6);
            ++restarts;
        }
    }
}

TEST(Solver, RejectsInfeasibleStart) {
    const SlotProblem p = single_link();
    EXPECT_THROW(solve_no_transfer(p, {}, Eigen::VectorXd::Constant(1, std::log(20.0))), ValidationError);
}

TEST(Solver, InfeasibleProblemsThrowWithCategory) {
    SlotProblem starved = single_link(1e-9);
    try {
        solve_no_transfer(starved);
        FAIL() << "expected infeasibility";
    } catch (const ProblemInfeasible& e) {
        EXPECT_EQ(e.category(), ErrorCategory::energy_infeasible);
    }
    SlotProblem jammed = coupled_pair(0.9);
    jammed.flows.setConstant(1.0);
    try {
        solve_no_transfer(jammed);
        FAIL() << "expected infeasibility";
    } catch (const ProblemInfeasible& e) {
        EXPECT_EQ(e.category(), ErrorCategory::rate_infeasible);
    }
}

TEST(Solver, Deterministic) {
    const SlotProblem p = testing::reference_slot_problem(false);
    const Solution a = solve_with_transfer(p);
    const Solution b = solve_with_transfer(p);
    EXPECT_EQ(a.log_power, b.log_power);
    EXPECT_EQ(a.transfer, b.transfer);
    EXPECT_EQ(a.objective, b.objective);
}

TEST(Solver, TraceFollowsBarrierSchedule) {
    const Solution s = solve_no_transfer(testing::reference_slot_problem(false));
    ASSERT_GE(s.trace.size(), 2u);
    EXPECT_DOUBLE_EQ(s.trace.front().mu, 1.0);
    for (std::size_t k = 1; k < s.trace.size(); ++k) EXPECT_NEAR(s.trace[k].mu, s.trace[k - 1].mu / 10.0, 1e-20);
    EXPECT_LT(s.duality_gap, 1e-8);
}

TEST(Solver, LowSinrLinksAreFlagged) {
    SolverOptions opt;
    opt.high_sinr_threshold = 1e9;
    const Solution s = solve_no_transfer(coupled_pair(0.01), opt);
    EXPECT_EQ(s.warnings.size(), 2u);
}

TEST(Kkt, CertifiesOracleOptimumOfPair) {
    const SlotProblem p = tight_pair();
    const Solution s = solve_no_transfer(p);
    const OracleResult o = brute_force_solve(p, GridSpec{}, false);
    EXPECT_NEAR(s.objective, o.value, 1e-3 * (1.0 + s.objective));
    expect_certified(p, s);
}

TEST(Kkt, PerturbedPointFailsStationarity) {
    const SlotProblem p = tight_pair();
    Solution s = solve_no_transfer(p);
    evaluate_links(p, (s.log_power.array() + std::log(0.9)).matrix(), s);
    EXPECT_GT(kkt_report(p, s).max_stationarity(), 1e-2);
}

TEST(Kkt, SharedOwnerEqualizesMarginalDelay) {
    const SlotProblem p = testing::shared_owner_problem();
    const Solution s = solve_no_transfer(p);
    const KktReport k = kkt_report(p, s);
    ASSERT_TRUE(k.lemma2_max_spread.has_value());
    EXPECT_LE(*k.lemma2_max_spread, 1e-5);
    expect_certified(p, s);
}

TEST(Kkt, NoSharedOwnerMeansNoSpread) {
    const SlotProblem p = testing::reference_slot_problem();
    EXPECT_FALSE(kkt_report(p, solve_no_transfer(p)).lemma2_max_spread.has_value());
}

}  // namespace
}  // namespace ehwsn
