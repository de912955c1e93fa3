#include "ehwsn/problem.hpp"

#include <algorithm>
#include <set>

namespace ehwsn {

void SlotProblem::validate() const {
    const Eigen::Index n = links();
    if (n == 0) throw ValidationError("slot problem has no active links");
    if (channel.links() != n) throw ValidationError("channel size does not match the flow vector");
    channel.validate();
    if (static_cast<Eigen::Index>(owner.size()) != n) {
        throw ValidationError("every active link needs an energy budget owner");
    }
    if (!(flows.array() > 0.0).all()) throw ValidationError("active links need positive flow");
    const auto nodes = static_cast<std::size_t>(energy.size());
    for (std::size_t o : owner) {
        if (o >= nodes) throw ValidationError("link owner outside the energy vector");
    }
    for (const TransferLink& t : transfers) {
        if (t.donor >= nodes || t.recipient >= nodes || t.donor == t.recipient) {
            throw ValidationError("energy link endpoints invalid");
        }
        if (!(t.efficiency >= 0.0 && t.efficiency <= 1.0)) {
            throw ValidationError("energy link efficiency outside [0, 1]");
        }
    }
    for (std::size_t b : budget_nodes()) {
        if (!(energy(static_cast<Eigen::Index>(b)) >= 0.0)) {
            throw ValidationError("node " + node_name(b) + " has negative energy");
        }
    }
}

std::vector<std::size_t> SlotProblem::budget_nodes() const {
    std::set<std::size_t> nodes(owner.begin(), owner.end());
    for (const TransferLink& t : transfers) nodes.insert(t.donor);
    return {nodes.begin(), nodes.end()};
}

std::string SlotProblem::link_name(Eigen::Index l) const {
    if (static_cast<std::size_t>(l) < link_labels.size()) return link_labels[static_cast<std::size_t>(l)];
    return "link" + std::to_string(l);
}

std::string SlotProblem::node_name(std::size_t n) const {
    if (n < node_labels.size()) return node_labels[n];
    return "node" + std::to_string(n);
}

SlotProblem SlotProblem::orthogonal() const {
    SlotProblem out = *this;
    out.channel = channel.orthogonal();
    return out;
}

SlotProblem SlotProblem::without_transfers() const {
    SlotProblem out = *this;
    out.transfers.clear();
    return out;
}

double objective_logdomain(const SlotProblem& problem, const Eigen::VectorXd& ptilde,
                           Eigen::Index* violated) {
    return delay_logdomain(problem.flows, problem.channel, ptilde, violated);
}

Eigen::VectorXd gradient_logdomain(const SlotProblem& problem, const Eigen::VectorXd& ptilde) {
    return delay_gradient_logdomain(problem.flows, problem.channel, ptilde);
}

Eigen::MatrixXd hessian_logdomain(const SlotProblem& problem, const Eigen::VectorXd& ptilde) {
    const auto& ch = problem.channel;
    const Eigen::Index n = problem.links();
    const Eigen::VectorXd p = ptilde.array().exp().matrix();
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd share(n);
    Eigen::VectorXd du(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const double margin = capacity_approx(ch, ptilde, l) - problem.flows(l);
        const double first = problem.flows(l) / (2.0 * margin * margin);
        const double second = first / margin;
        const double heard = interference_plus_noise(ch, p, l);
        for (Eigen::Index k = 0; k < n; ++k) share(k) = k == l ? 0.0 : ch.gain(k, l) * p(k) / heard;
        du = share;
        du(l) = -1.0;
        hess.noalias() += second * du * du.transpose();
        hess.diagonal() += first * share;
        hess.noalias() -= first * share * share.transpose();
    }
    return hess;
}

}  // namespace ehwsn
