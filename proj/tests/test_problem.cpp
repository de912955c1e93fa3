#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "ehwsn/feasibility.hpp"
#include "ehwsn/problem.hpp"
#include "fixtures.hpp"

namespace ehwsn {
namespace {

using LVector = VectorX<long double>;

/// Minimum high-SINR powers under a common random scale, jittered, kept
/// only when every rate stays above its flow.
Eigen::VectorXd interior_point(const SlotProblem& p, Rng& rng) {
    std::uniform_real_distribution<double> scale(std::log(1.5), std::log(1e4));
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    const Eigen::VectorXd base =
        min_power_vector(p.channel, p.flows, RateModel::high_sinr).power().array().log().matrix();
    while (true) {
        Eigen::VectorXd pt = base.array() + scale(rng);
        for (Eigen::Index l = 0; l < pt.size(); ++l) pt(l) += jitter(rng);
        if (std::isfinite(objective_logdomain(p, pt))) return pt;
    }
}

/// Central differences of the long double objective.
Eigen::VectorXd fd_gradient(const SlotProblem& p, const Eigen::VectorXd& pt, long double h = 1e-6L) {
    const ChannelState<long double> ch = p.channel.cast<long double>();
    const LVector flows = p.flows.cast<long double>();
    Eigen::VectorXd g(pt.size());
    for (Eigen::Index k = 0; k < pt.size(); ++k) {
        LVector a = pt.cast<long double>(), b = a;
        a(k) += h;
        b(k) -= h;
        g(k) = static_cast<double>((delay_logdomain(flows, ch, a) - delay_logdomain(flows, ch, b)) / (2 * h));
    }
    return g;
}

TEST(Objective, ReferenceSlotSinrPoint) {
    // Noise 1 and unit gains make exp(ptilde) the SINR itself.
    SlotProblem p = testing::reference_slot_problem();
    p.channel.noise.setOnes();
    Eigen::VectorXd pt(5);
    pt << 78.6533, 143.1230, 57.5294, 14.3840, 43.8209;
    pt = pt.array().log().matrix();
    EXPECT_NEAR(objective_logdomain(p, pt), 1.8858, 0.01);
}

TEST(Objective, VanishingFlow) {
    SlotProblem p = testing::reference_slot_problem();
    p.flows.setConstant(1e-12);
    EXPECT_LT(objective_logdomain(p, Eigen::VectorXd::Constant(5, std::log(10.0))), 1e-11);
}

TEST(Objective, OutsideRateDomainIsInfinite) {
    const SlotProblem p = testing::reference_slot_problem();
    Eigen::VectorXd pt = Eigen::VectorXd::Constant(5, std::log(10.0));
    pt(3) = std::log(1e-5);  // SINR 1 on l12
    Eigen::Index bad = -1;
    EXPECT_EQ(objective_logdomain(p, pt, &bad), std::numeric_limits<double>::infinity());
    EXPECT_EQ(bad, 3);
}

TEST(Gradient, SingleLinkScalar) {
    SlotProblem p;
    p.flows = Eigen::VectorXd::Constant(1, 0.8752);
    p.channel = {Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Constant(1, 1e-5)};
    p.owner = {0};
    p.energy = Eigen::VectorXd::Constant(1, 10.0);
    const Eigen::VectorXd pt = Eigen::VectorXd::Constant(1, std::log(3.0));
    const double r = 0.5 * std::log(3.0 / 1e-5) - 0.8752;
    EXPECT_NEAR(gradient_logdomain(p, pt)(0), -0.8752 / (2 * r * r), 1e-14);
}

TEST(Gradient, SymmetricPairHasEqualComponents) {
    SlotProblem p;
    p.flows = Eigen::VectorXd::Constant(2, 0.5);
    p.channel.gain.resize(2, 2);
    p.channel.gain << 1.0, 0.01, 0.01, 1.0;
    p.channel.noise = Eigen::VectorXd::Constant(2, 1e-5);
    p.owner = {0, 1};
    p.energy = Eigen::VectorXd::Constant(2, 10.0);
    const Eigen::VectorXd g = gradient_logdomain(p, Eigen::VectorXd::Constant(2, std::log(4.0)));
    EXPECT_NEAR(g(0), g(1), 1e-15);
}

TEST(Gradient, MatchesFiniteDifferences) {
    Rng rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const SlotProblem p = testing::random_problem(rng, 1 + static_cast<Eigen::Index>(rng() % 5), 0, 0.05);
        const Eigen::VectorXd pt = interior_point(p, rng);
        const Eigen::VectorXd g = gradient_logdomain(p, pt);
        const Eigen::VectorXd fd = fd_gradient(p, pt);
        EXPECT_LE((g - fd).norm(), 1e-6 * fd.norm()) << "trial " << trial;
    }
}

TEST(Hessian, MatchesFiniteDifferencesOfGradient) {
    Rng rng(52);
    for (int trial = 0; trial < 50; ++trial) {
        const SlotProblem p = testing::random_problem(rng, 1 + static_cast<Eigen::Index>(rng() % 4), 0, 0.05);
        const Eigen::VectorXd pt = interior_point(p, rng);
        const Eigen::MatrixXd h = hessian_logdomain(p, pt);
        const ChannelState<long double> ch = p.channel.cast<long double>();
        const LVector flows = p.flows.cast<long double>();
        Eigen::MatrixXd fd(pt.size(), pt.size());
        const long double step = 1e-6L;
        for (Eigen::Index k = 0; k < pt.size(); ++k) {
            LVector a = pt.cast<long double>(), b = a;
            a(k) += step;
            b(k) -= step;
            fd.col(k) = ((delay_gradient_logdomain(flows, ch, a) - delay_gradient_logdomain(flows, ch, b)) /
                         (2 * step))
                            .cast<double>();
        }
        EXPECT_LE((h - fd).norm(), 1e-6 * fd.norm()) << "trial " << trial;
        EXPECT_LE((h - h.transpose()).norm(), 1e-12 * h.norm());
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().minCoeff(),
                  -1e-12 * h.norm());
    }
}

TEST(SlotProblemValidation, RejectsInconsistentInstances) {
    SlotProblem p = testing::reference_slot_problem();
    EXPECT_NO_THROW(p.validate());
    SlotProblem bad = p;
    bad.flows(0) = 0.0;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = p;
    bad.owner.pop_back();
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = p;
    bad.transfers[0].efficiency = 1.5;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = p;
    bad.transfers[0].donor = 42;
    EXPECT_THROW(bad.validate(), ValidationError);
    bad = p;
    bad.energy(0) = -1.0;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(SlotProblemViews, OrthogonalAndWithoutTransfers) {
    const SlotProblem p = testing::reference_slot_problem(false);
    const SlotProblem o = p.orthogonal();
    EXPECT_EQ(o.channel.gain, Eigen::MatrixXd(p.channel.gain.diagonal().asDiagonal()));
    EXPECT_TRUE(p.without_transfers().transfers.empty());
    EXPECT_EQ(p.budget_nodes().size(), 10u);
    EXPECT_EQ(p.without_transfers().budget_nodes().size(), 5u);
    EXPECT_EQ(p.link_name(1), "l8");
    EXPECT_EQ(p.node_name(3), "node3");
}

}  // namespace
}  // namespace ehwsn
