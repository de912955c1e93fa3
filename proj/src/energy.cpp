#include "ehwsn/energy.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace ehwsn {

void EnergyState::validate(const Topology& topology) const {
    if (available.size() != static_cast<Eigen::Index>(topology.node_count())) {
        throw ValidationError("energy vector size does not match the node count");
    }
    for (std::size_t n = 0; n < topology.node_count(); ++n) {
        if (topology.nodes()[n] == kSinkId) continue;
        const double e = available(static_cast<Eigen::Index>(n));
        if (!(e > 0.0 && e <= battery_capacity)) {
            throw ValidationError("node " + std::to_string(topology.nodes()[n]) + " energy " +
                                  std::to_string(e) + " outside (0, battery capacity]");
        }
    }
}

void TransferVector::validate() const {
    if (!(amount.array() >= 0.0).all()) throw ValidationError("transfers must be nonnegative");
}

EnergyState sample_arrivals(Rng& rng, std::size_t nodes, double lambda, double battery_capacity) {
    if (!(lambda > 0.0)) throw ValidationError("arrival rate must be positive");
    if (!(battery_capacity >= 1.0)) throw ValidationError("battery capacity must be at least 1");
    std::poisson_distribution<int> arrivals(lambda);
    EnergyState state;
    state.battery_capacity = battery_capacity;
    state.available.resize(static_cast<Eigen::Index>(nodes));
    for (Eigen::Index n = 0; n < state.available.size(); ++n) {
        int draw = 0;
        while (draw == 0) draw = arrivals(rng);
        state.available(n) = std::min(static_cast<double>(draw), battery_capacity);
    }
    return state;
}

double available_energy(NodeId node, const EnergyState& energy, const TransferVector& x,
                        const Topology& topology) {
    const std::size_t n = topology.index_of(node);
    if (x.amount.size() != static_cast<Eigen::Index>(topology.energy_link_count())) {
        throw ValidationError("transfer vector size does not match the energy link count");
    }
    double total = energy.available(static_cast<Eigen::Index>(n));
    for (std::size_t q = 0; q < topology.energy_link_count(); ++q) {
        const EnergyLink& link = topology.energy_links()[q];
        if (link.to == node) total += link.efficiency * x.amount(static_cast<Eigen::Index>(q));
    }
    return total;
}

Eigen::VectorXd check_energy_budget(const IncidenceMatrices& m, const Eigen::VectorXd& power,
                                    const Eigen::VectorXd& transfer, const Eigen::VectorXd& energy) {
    if (power.size() != m.K.cols() || transfer.size() != m.B.cols() || energy.size() != m.K.rows()) {
        throw ValidationError("energy budget: dimension mismatch");
    }
    return energy - m.K * power - m.B * transfer;
}

}  // namespace ehwsn
