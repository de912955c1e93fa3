#ifndef EHWSN_TESTS_FIXTURES_HPP
#define EHWSN_TESTS_FIXTURES_HPP

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "ehwsn/channel.hpp"
#include "ehwsn/problem.hpp"
#include "ehwsn/topology.hpp"

namespace ehwsn::testing {

/// Reference-slot slot: links l1, l8, l9, l12, l13 owned by nodes 0..4, donors
/// v4, v7, v10, v11, v14 at nodes 5..9, unit direct gains, noise 1e-5.
inline SlotProblem reference_slot_problem(bool orthogonal = true) {
    SlotProblem p;
    p.flows.resize(5);
    p.flows << 0.4585, 0.8752, 0.6869, 0.2313, 0.4887;
    p.energy.resize(10);
    p.energy << 9, 10, 7, 8, 9, 11, 10, 8, 4, 6;
    p.channel.gain = Eigen::MatrixXd::Identity(5, 5);
    if (!orthogonal) {
        Rng rng(7);
        p.channel = sample_gains(rng, 5);
    }
    p.channel.noise = Eigen::VectorXd::Constant(5, 1e-5);
    for (std::size_t l = 0; l < 5; ++l) {
        p.owner.push_back(l);
        p.transfers.push_back({l + 5, l, 0.6});
    }
    p.link_labels = {"l1", "l8", "l9", "l12", "l13"};
    return p;
}

/// Random instance in the high-SINR regime. Each link has its own owner;
/// transfer q goes from an extra donor node to the owner of link q.
inline SlotProblem random_problem(Rng& rng, Eigen::Index links, Eigen::Index transfers,
                                  double max_interference = 0.01) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SlotProblem p;
    p.flows.resize(links);
    for (Eigen::Index l = 0; l < links; ++l) p.flows(l) = 0.1 + 0.9 * (1.0 - unit(rng));
    GainDistribution dist;
    dist.max_interference_gain = max_interference;
    p.channel = sample_gains(rng, links, dist);
    p.energy.resize(links + transfers);
    for (Eigen::Index n = 0; n < p.energy.size(); ++n) p.energy(n) = 1.0 + 19.0 * unit(rng);
    for (Eigen::Index l = 0; l < links; ++l) p.owner.push_back(static_cast<std::size_t>(l));
    for (Eigen::Index q = 0; q < transfers; ++q) {
        p.transfers.push_back({static_cast<std::size_t>(links + q), static_cast<std::size_t>(q % links), 0.6});
    }
    return p;
}

/// One node owning two links plus a second node with one link; the only
/// budget shared by two links belongs to node 0.
inline SlotProblem shared_owner_problem() {
    SlotProblem p;
    p.flows.resize(3);
    p.flows << 0.6, 0.4, 0.8;
    Rng rng(11);
    p.channel = sample_gains(rng, 3);
    p.owner = {0, 0, 1};
    p.energy.resize(2);
    p.energy << 6.0, 9.0;
    return p;
}

inline Topology chain3() { return Topology({0, 1, 2}, {{2, 1}, {1, 0}}, {}); }

inline Topology tree15() {
    std::vector<DataLink> data{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0},  {9, 2},
                               {10, 2}, {8, 3}, {7, 3}, {12, 5}, {11, 5}, {13, 6}, {14, 6}};
    std::vector<EnergyLink> energy;
    const int pairs[][2] = {{9, 2},  {10, 2}, {7, 3},   {8, 3},   {11, 5}, {12, 5},  {13, 6},
                            {14, 6}, {4, 1},  {1, 4},   {7, 8},   {8, 7},  {10, 9},  {9, 10},
                            {11, 12}, {12, 11}, {14, 13}, {13, 14}, {3, 2}, {6, 5}};
    for (const auto& e : pairs) energy.push_back({e[0], e[1], 0.6});
    std::vector<NodeId> nodes;
    for (int n = 0; n < 15; ++n) nodes.push_back(n);
    return Topology(nodes, data, energy);
}

}  // namespace ehwsn::testing

#endif  // EHWSN_TESTS_FIXTURES_HPP
