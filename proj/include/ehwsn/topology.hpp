#ifndef EHWSN_TOPOLOGY_HPP
#define EHWSN_TOPOLOGY_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ehwsn/errors.hpp"

namespace ehwsn {

using NodeId = int;

/// The sink always carries this id.
inline constexpr NodeId kSinkId = 0;

struct DataLink {
    NodeId from;  ///< child (transmitter)
    NodeId to;    ///< parent (receiver)
};

struct EnergyLink {
    NodeId from;  ///< donor
    NodeId to;    ///< recipient
    double efficiency = 1.0;
};

/// Names the link that broke a topology invariant. `link` is the position in
/// the data-link list (or energy-link list when `energy` is set).
class TopologyError : public ValidationError {
public:
    TopologyError(std::optional<std::size_t> link, bool energy, const std::string& what)
        : ValidationError(what), link_(link), energy_(energy) {}

    std::optional<std::size_t> link() const noexcept { return link_; }
    bool energy_link() const noexcept { return energy_; }

private:
    std::optional<std::size_t> link_;
    bool energy_;
};

/// Data-collection tree rooted at the sink plus the directed energy links.
/// Immutable once constructed; construction validates every invariant.
class Topology {
public:
    Topology(std::vector<NodeId> nodes, std::vector<DataLink> data_links,
             std::vector<EnergyLink> energy_links);

    const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
    const std::vector<DataLink>& data_links() const noexcept { return data_links_; }
    const std::vector<EnergyLink>& energy_links() const noexcept { return energy_links_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t data_link_count() const noexcept { return data_links_.size(); }
    std::size_t energy_link_count() const noexcept { return energy_links_.size(); }

    /// Row index of `id` in the incidence matrices.
    std::size_t index_of(NodeId id) const;
    bool contains(NodeId id) const noexcept;
    std::size_t sink_index() const { return index_of(kSinkId); }

    /// Data link leaving `id`, empty for the sink.
    std::optional<std::size_t> uplink_of(NodeId id) const;
    /// Data links entering `id`, in link order.
    std::vector<std::size_t> downlinks_of(NodeId id) const;
    /// Hop count from `id` to the sink.
    int depth(NodeId id) const;
    int max_degree() const;

    /// "l<child>": data links are named after their transmitter.
    std::string data_link_label(std::size_t link) const;

private:
    std::vector<NodeId> nodes_;
    std::vector<DataLink> data_links_;
    std::vector<EnergyLink> energy_links_;
    std::vector<std::optional<std::size_t>> uplink_;  // by node index
    std::vector<int> depth_;                           // by node index
};

struct IncidenceMatrices {
    Eigen::MatrixXd A;  ///< N x L data incidence, +1 at transmitter, -1 at receiver
    Eigen::MatrixXd B;  ///< N x Q energy incidence, +1 at donor, -efficiency at recipient
    Eigen::MatrixXd K;  ///< positive part of A: outgoing-link selector
};

IncidenceMatrices build_incidence(const Topology& topology);

/// Returns s - A d. A max-abs entry at or below 1e-12 means conserved.
Eigen::VectorXd check_flow_conservation(const IncidenceMatrices& m, const Eigen::VectorXd& flows,
                                        const Eigen::VectorXd& divergence);

struct Slot {
    std::vector<std::size_t> data_links;    ///< active links, ascending link index
    std::vector<std::size_t> energy_links;  ///< links whose donor is idle this slot
};

struct Schedule {
    std::vector<Slot> slots;
};

/// True when no node is an endpoint of two links of `links`.
bool is_half_duplex(const Topology& topology, const std::vector<std::size_t>& links);

/// Greedy proper edge coloring of the tree from the sink down; each color
/// class is a slot. Slots are ordered by decreasing depth of their deepest
/// child endpoint, ties by color. Children are visited in data-link order.
Schedule half_duplex_schedule(const Topology& topology);

}  // namespace ehwsn

#endif  // EHWSN_TOPOLOGY_HPP
