#include "ehwsn/topology.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace ehwsn {

std::string_view to_string(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::validation: return "validation";
        case ErrorCategory::config: return "config";
        case ErrorCategory::capacity_violation: return "capacity_violation";
        case ErrorCategory::rate_infeasible: return "rate_infeasible";
        case ErrorCategory::energy_infeasible: return "energy_infeasible";
        case ErrorCategory::not_converged: return "not_converged";
        case ErrorCategory::io: return "io";
        case ErrorCategory::kkt: return "kkt";
    }
    return "unknown";
}

CapacityViolation::CapacityViolation(long link, double flow, double capacity)
    : Error(ErrorCategory::capacity_violation,
            "link " + std::to_string(link) + ": flow " + std::to_string(flow) +
                " is not below capacity " + std::to_string(capacity)),
      link_(link), flow_(flow), capacity_(capacity) {}

RateInfeasible::RateInfeasible(double spectral_radius)
    : Error(ErrorCategory::rate_infeasible,
            "demanded rates unreachable: normalized interference spectral radius " +
                std::to_string(spectral_radius) + " >= 1"),
      spectral_radius_(spectral_radius) {}

namespace {

std::string describe(const DataLink& link) {
    return "data link " + std::to_string(link.from) + "->" + std::to_string(link.to);
}

std::string describe(const EnergyLink& link) {
    return "energy link " + std::to_string(link.from) + "->" + std::to_string(link.to);
}

}  // namespace

Topology::Topology(std::vector<NodeId> nodes, std::vector<DataLink> data_links,
                   std::vector<EnergyLink> energy_links)
    : nodes_(std::move(nodes)),
      data_links_(std::move(data_links)),
      energy_links_(std::move(energy_links)) {
    std::set<NodeId> seen;
    for (NodeId id : nodes_) {
        if (!seen.insert(id).second) {
            throw TopologyError(std::nullopt, false, "duplicate node id " + std::to_string(id));
        }
    }
    if (!contains(kSinkId)) {
        throw TopologyError(std::nullopt, false, "topology has no sink (node 0)");
    }

    uplink_.assign(nodes_.size(), std::nullopt);
    for (std::size_t l = 0; l < data_links_.size(); ++l) {
        const DataLink& link = data_links_[l];
        if (!contains(link.from) || !contains(link.to)) {
            throw TopologyError(l, false, describe(link) + " references an unknown node");
        }
        if (link.from == link.to) {
            throw TopologyError(l, false, describe(link) + " is a self loop");
        }
        if (link.from == kSinkId) {
            throw TopologyError(l, false, describe(link) + " leaves the sink");
        }
        auto& up = uplink_[index_of(link.from)];
        if (up) {
            throw TopologyError(l, false,
                                describe(link) + " gives node " + std::to_string(link.from) +
                                    " a second parent");
        }
        up = l;
    }

    // Every non-sink node must reach the sink by following uplinks.
    depth_.assign(nodes_.size(), -1);
    depth_[sink_index()] = 0;
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        std::vector<std::size_t> path;
        std::size_t cur = n;
        while (depth_[cur] < 0) {
            if (std::find(path.begin(), path.end(), cur) != path.end()) {
                throw TopologyError(uplink_[cur], false,
                                    describe(data_links_[*uplink_[cur]]) + " closes a cycle");
            }
            path.push_back(cur);
            if (!uplink_[cur]) {
                throw TopologyError(std::nullopt, false,
                                    "node " + std::to_string(nodes_[cur]) +
                                        " has no outgoing data link");
            }
            cur = index_of(data_links_[*uplink_[cur]].to);
        }
        int d = depth_[cur];
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            depth_[*it] = ++d;
        }
    }

    for (std::size_t q = 0; q < energy_links_.size(); ++q) {
        const EnergyLink& link = energy_links_[q];
        if (!contains(link.from) || !contains(link.to)) {
            throw TopologyError(q, true, describe(link) + " references an unknown node");
        }
        if (link.from == link.to) {
            throw TopologyError(q, true, describe(link) + " is a self loop");
        }
        if (link.from == kSinkId) {
            throw TopologyError(q, true, describe(link) + " originates at the sink");
        }
        if (!(link.efficiency > 0.0 && link.efficiency <= 1.0)) {
            throw TopologyError(q, true, describe(link) + " efficiency outside (0, 1]");
        }
    }
}

std::size_t Topology::index_of(NodeId id) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end()) {
        throw ValidationError("unknown node " + std::to_string(id));
    }
    return static_cast<std::size_t>(it - nodes_.begin());
}

bool Topology::contains(NodeId id) const noexcept {
    return std::find(nodes_.begin(), nodes_.end(), id) != nodes_.end();
}

std::optional<std::size_t> Topology::uplink_of(NodeId id) const { return uplink_[index_of(id)]; }

std::vector<std::size_t> Topology::downlinks_of(NodeId id) const {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < data_links_.size(); ++l) {
        if (data_links_[l].to == id) out.push_back(l);
    }
    return out;
}

int Topology::depth(NodeId id) const { return depth_[index_of(id)]; }

int Topology::max_degree() const {
    std::map<NodeId, int> degree;
    for (const DataLink& link : data_links_) {
        ++degree[link.from];
        ++degree[link.to];
    }
    int best = 0;
    for (const auto& [id, deg] : degree) best = std::max(best, deg);
    return best;
}

std::string Topology::data_link_label(std::size_t link) const {
    return "l" + std::to_string(data_links_.at(link).from);
}

IncidenceMatrices build_incidence(const Topology& topology) {
    const auto n = static_cast<Eigen::Index>(topology.node_count());
    const auto l_count = static_cast<Eigen::Index>(topology.data_link_count());
    const auto q_count = static_cast<Eigen::Index>(topology.energy_link_count());

    IncidenceMatrices m;
    m.A = Eigen::MatrixXd::Zero(n, l_count);
    m.B = Eigen::MatrixXd::Zero(n, q_count);
    for (Eigen::Index l = 0; l < l_count; ++l) {
        const DataLink& link = topology.data_links()[static_cast<std::size_t>(l)];
        m.A(static_cast<Eigen::Index>(topology.index_of(link.from)), l) = 1.0;
        m.A(static_cast<Eigen::Index>(topology.index_of(link.to)), l) = -1.0;
    }
    for (Eigen::Index q = 0; q < q_count; ++q) {
        const EnergyLink& link = topology.energy_links()[static_cast<std::size_t>(q)];
        m.B(static_cast<Eigen::Index>(topology.index_of(link.from)), q) = 1.0;
        m.B(static_cast<Eigen::Index>(topology.index_of(link.to)), q) = -link.efficiency;
    }
    m.K = m.A.cwiseMax(0.0);
    return m;
}

Eigen::VectorXd check_flow_conservation(const IncidenceMatrices& m, const Eigen::VectorXd& flows,
                                        const Eigen::VectorXd& divergence) {
    if (flows.size() != m.A.cols() || divergence.size() != m.A.rows()) {
        throw ValidationError("flow conservation: dimension mismatch (A is " +
                              std::to_string(m.A.rows()) + "x" + std::to_string(m.A.cols()) +
                              ", d has " + std::to_string(flows.size()) + ", s has " +
                              std::to_string(divergence.size()) + ")");
    }
    return divergence - m.A * flows;
}

bool is_half_duplex(const Topology& topology, const std::vector<std::size_t>& links) {
    std::set<NodeId> busy;
    for (std::size_t l : links) {
        const DataLink& link = topology.data_links().at(l);
        if (!busy.insert(link.from).second || !busy.insert(link.to).second) return false;
    }
    return true;
}

Schedule half_duplex_schedule(const Topology& topology) {
    const std::size_t l_count = topology.data_link_count();
    std::vector<int> color(l_count, -1);

    // Breadth-first from the sink; every child edge picks the smallest color
    // unused at its parent (the parent's own uplink included).
    std::vector<NodeId> frontier{kSinkId};
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId parent : frontier) {
            std::set<int> used;
            if (auto up = topology.uplink_of(parent)) used.insert(color[*up]);
            for (std::size_t l : topology.downlinks_of(parent)) {
                int c = 0;
                while (used.count(c)) ++c;
                color[l] = c;
                used.insert(c);
                next.push_back(topology.data_links()[l].from);
            }
        }
        frontier = std::move(next);
    }

    const int colors = l_count == 0 ? 0 : *std::max_element(color.begin(), color.end()) + 1;
    std::vector<Slot> classes(static_cast<std::size_t>(colors));
    std::vector<int> deepest(static_cast<std::size_t>(colors), 0);
    for (std::size_t l = 0; l < l_count; ++l) {
        auto c = static_cast<std::size_t>(color[l]);
        classes[c].data_links.push_back(l);
        deepest[c] = std::max(deepest[c], topology.depth(topology.data_links()[l].from));
    }

    std::vector<std::size_t> order(classes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return deepest[a] > deepest[b]; });

    Schedule schedule;
    for (std::size_t c : order) {
        Slot slot = std::move(classes[c]);
        std::set<NodeId> transmitters;
        for (std::size_t l : slot.data_links) transmitters.insert(topology.data_links()[l].from);
        for (std::size_t q = 0; q < topology.energy_link_count(); ++q) {
            if (!transmitters.count(topology.energy_links()[q].from)) slot.energy_links.push_back(q);
        }
        schedule.slots.push_back(std::move(slot));
    }
    return schedule;
}

}  // namespace ehwsn
