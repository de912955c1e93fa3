#ifndef EHWSN_ENERGY_HPP
#define EHWSN_ENERGY_HPP

#include <Eigen/Core>

#include "ehwsn/channel.hpp"
#include "ehwsn/topology.hpp"

namespace ehwsn {

/// Battery content of every node for one slot, indexed like the topology's
/// node list. The sink entry is carried along but never constrains anything.
struct EnergyState {
    Eigen::VectorXd available;
    double battery_capacity = 20.0;

    void validate(const Topology& topology) const;
};

struct TransferVector {
    Eigen::VectorXd amount;  ///< per energy link, topology order

    void validate() const;
};

/// Poisson(lambda) harvest per node; zero draws are redrawn and the result is
/// clamped to the battery capacity.
EnergyState sample_arrivals(Rng& rng, std::size_t nodes, double lambda, double battery_capacity);

/// E_n plus everything delivered to `node` over its incoming energy links.
double available_energy(NodeId node, const EnergyState& energy, const TransferVector& x,
                        const Topology& topology);

/// E - K p - B x. Every entry >= -1e-9 means the budget holds.
Eigen::VectorXd check_energy_budget(const IncidenceMatrices& m, const Eigen::VectorXd& power,
                                    const Eigen::VectorXd& transfer, const Eigen::VectorXd& energy);

}  // namespace ehwsn

#endif  // EHWSN_ENERGY_HPP
