#ifndef EHWSN_PROBLEM_HPP
#define EHWSN_PROBLEM_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ehwsn/channel.hpp"

namespace ehwsn {

/// Energy link as seen by one slot problem. Donor and recipient index the
/// problem's energy vector.
struct TransferLink {
    std::size_t donor;
    std::size_t recipient;
    double efficiency;
};

/// One slot's delay-minimization instance: the active links with their flows
/// and channel, the node energies and the energy links usable this slot.
/// Links may share an owner (test fixtures); the simulator never does that.
struct SlotProblem {
    Eigen::VectorXd flows;
    ChannelState<double> channel;
    std::vector<std::size_t> owner;  ///< energy-vector index of each link's transmitter
    Eigen::VectorXd energy;          ///< E_n for every node the problem can reference
    std::vector<TransferLink> transfers;

    std::vector<std::string> link_labels;  ///< optional, for reports
    std::vector<std::string> node_labels;  ///< optional, for reports

    Eigen::Index links() const { return flows.size(); }
    Eigen::Index transfer_count() const { return static_cast<Eigen::Index>(transfers.size()); }

    /// Throws ValidationError on inconsistent sizes, nonpositive flows or
    /// energies, out-of-range indices, or efficiencies outside [0, 1].
    void validate() const;

    /// Nodes with a budget constraint: link owners and donors, ascending.
    std::vector<std::size_t> budget_nodes() const;

    std::string link_name(Eigen::Index l) const;
    std::string node_name(std::size_t n) const;

    /// Same problem with all interference gains zeroed.
    SlotProblem orthogonal() const;
    /// Same problem with the energy links dropped.
    SlotProblem without_transfers() const;
};

// ---------------------------------------------------------------------------
// Scalar-generic delay model in the log-power domain.

/// Sum over links of d / (c_approx - d); +infinity outside the rate domain.
template <typename Scalar, typename Derived>
Scalar delay_logdomain(const VectorX<Scalar>& flows, const ChannelState<Scalar>& ch,
                       const Eigen::MatrixBase<Derived>& ptilde, Eigen::Index* violated = nullptr) {
    Scalar total(0);
    for (Eigen::Index l = 0; l < flows.size(); ++l) {
        const Scalar margin = capacity_approx(ch, ptilde, l) - flows(l);
        if (!(margin > Scalar(0))) {
            if (violated) *violated = l;
            return std::numeric_limits<Scalar>::infinity();
        }
        total += flows(l) / margin;
    }
    return total;
}

/// Analytic gradient of delay_logdomain. Includes, for each link, the effect
/// of its power on every other link's interference.
template <typename Scalar, typename Derived>
VectorX<Scalar> delay_gradient_logdomain(const VectorX<Scalar>& flows, const ChannelState<Scalar>& ch,
                                         const Eigen::MatrixBase<Derived>& ptilde) {
    using std::exp;
    const Eigen::Index n = flows.size();
    const VectorX<Scalar> p = ptilde.derived().array().exp().matrix();
    VectorX<Scalar> grad = VectorX<Scalar>::Zero(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const Scalar margin = capacity_approx(ch, ptilde, l) - flows(l);
        const Scalar weight = flows(l) / (Scalar(2) * margin * margin);
        const Scalar heard = interference_plus_noise(ch, p, l);
        grad(l) -= weight;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k != l) grad(k) += weight * ch.gain(k, l) * p(k) / heard;
        }
    }
    return grad;
}

/// Exact-rate total delay in raw powers, the untransformed objective.
template <typename Scalar, typename Derived>
Scalar delay_exact_power(const VectorX<Scalar>& flows, const ChannelState<Scalar>& ch,
                         const Eigen::MatrixBase<Derived>& p) {
    Scalar total(0);
    for (Eigen::Index l = 0; l < flows.size(); ++l) {
        const Scalar margin = capacity_exact(ch, p, l) - flows(l);
        if (!(margin > Scalar(0))) return std::numeric_limits<Scalar>::infinity();
        total += flows(l) / margin;
    }
    return total;
}

// ---------------------------------------------------------------------------
// SlotProblem conveniences (double precision).

/// +infinity when some link's approximate rate does not exceed its flow; the
/// offending link is written to `violated` when given.
double objective_logdomain(const SlotProblem& problem, const Eigen::VectorXd& ptilde,
                           Eigen::Index* violated = nullptr);
Eigen::VectorXd gradient_logdomain(const SlotProblem& problem, const Eigen::VectorXd& ptilde);
Eigen::MatrixXd hessian_logdomain(const SlotProblem& problem, const Eigen::VectorXd& ptilde);

}  // namespace ehwsn

#endif  // EHWSN_PROBLEM_HPP
