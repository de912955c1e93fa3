#include "ehwsn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

namespace ehwsn {

namespace {

Rng stream(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    return Rng(seq);
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<std::string> node_labels(const Topology& topology) {
    std::vector<std::string> out;
    for (NodeId id : topology.nodes()) out.push_back("v" + std::to_string(id));
    return out;
}

SlotOutcome solve_slot(const ScenarioConfig& config, const Schedule& schedule, int slot,
                       const Eigen::VectorXd& flows, const EnergyState& energy) {
    SlotOutcome out;
    out.slot = slot;
    const Slot& s = schedule.slots[static_cast<std::size_t>(slot) % schedule.slots.size()];
    out.data_links = s.data_links;
    out.problem = build_slot_problem(config, schedule, slot, flows, energy, &out.energy_links);

    try {
        Solution sol = config.transfer == TransferMode::on && !out.problem.transfers.empty()
                           ? solve_with_transfer(out.problem, config.solver)
                           : solve_no_transfer(out.problem, config.solver);
        const KktReport kkt = kkt_report(out.problem, sol);
        out.feasible = true;
        out.delay = sol.objective;
        out.min_sinr = sol.sinr.minCoeff();
        out.kkt_stationarity = kkt.max_stationarity();
        out.kkt_slackness = kkt.max_slackness();
        out.diagnostics = sol.warnings;
        if (!sol.converged) out.diagnostics.push_back("solver: " + sol.termination);
        out.solution = std::move(sol);
    } catch (const ProblemInfeasible& e) {
        out.feasible = false;
        out.delay = std::numeric_limits<double>::infinity();
        out.min_sinr = std::numeric_limits<double>::quiet_NaN();
        out.diagnostics = e.report().reasons;
    }
    return out;
}

}  // namespace

int slot_count(const ScenarioConfig& config) {
    if (config.slots > 0) return config.slots;
    return static_cast<int>(half_duplex_schedule(config.topology).slots.size());
}

Eigen::VectorXd sample_round_flows(const ScenarioConfig& config, int round) {
    const Topology& topo = config.topology;
    Rng rng = stream(config.seeds.flows, round);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd flows(static_cast<Eigen::Index>(topo.data_link_count()));
    for (Eigen::Index l = 0; l < flows.size(); ++l) {
        flows(l) = config.distributions.max_flow * (1.0 - unit(rng));
        auto it = config.explicit_values.flows.find(topo.data_links()[static_cast<std::size_t>(l)].from);
        if (it != config.explicit_values.flows.end()) flows(l) = it->second;
    }
    return flows;
}

EnergyState sample_slot_energy(const ScenarioConfig& config, int slot) {
    const Topology& topo = config.topology;
    Rng rng = stream(config.seeds.energy, slot);
    EnergyState e = sample_arrivals(rng, topo.node_count(), config.distributions.energy_rate,
                                    config.distributions.battery_capacity);
    for (const auto& [node, value] : config.explicit_values.energy) {
        e.available(static_cast<Eigen::Index>(topo.index_of(node))) = value;
    }
    return e;
}

SlotProblem build_slot_problem(const ScenarioConfig& config, const Schedule& schedule, int slot,
                               const Eigen::VectorXd& flows, const EnergyState& energy,
                               std::vector<std::size_t>* energy_links) {
    const Topology& topo = config.topology;
    const Slot& s = schedule.slots.at(static_cast<std::size_t>(slot) % schedule.slots.size());
    const auto n = static_cast<Eigen::Index>(s.data_links.size());

    SlotProblem problem;
    problem.flows.resize(n);
    problem.energy = energy.available;
    problem.node_labels = node_labels(topo);
    std::set<NodeId> transmitters;
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t l = s.data_links[static_cast<std::size_t>(i)];
        const DataLink& link = topo.data_links()[l];
        problem.flows(i) = flows(static_cast<Eigen::Index>(l));
        problem.owner.push_back(topo.index_of(link.from));
        problem.link_labels.push_back(topo.data_link_label(l));
        transmitters.insert(link.from);
    }

    Rng rng = stream(config.seeds.gains, slot);
    problem.channel = sample_gains(rng, n, config.distributions.gains);
    if (auto it = config.explicit_values.gains.find(slot); it != config.explicit_values.gains.end()) {
        if (it->second.rows() != n || it->second.cols() != n) {
            throw ConfigError("explicit gains for slot " + std::to_string(slot) + " must be " +
                              std::to_string(n) + "x" + std::to_string(n));
        }
        problem.channel.gain = it->second;
    }
    if (config.channel == ChannelMode::orthogonal) problem.channel = problem.channel.orthogonal();

    if (energy_links) energy_links->clear();
    if (config.transfer == TransferMode::on) {
        // Only links feeding a transmitter of this slot can change anything.
        for (std::size_t q : s.energy_links) {
            const EnergyLink& link = topo.energy_links()[q];
            if (!transmitters.count(link.to)) continue;
            problem.transfers.push_back({topo.index_of(link.from), topo.index_of(link.to), link.efficiency});
            if (energy_links) energy_links->push_back(q);
        }
    }
    return problem;
}

SlotOutcome run_slot(const ScenarioConfig& config, int slot) {
    if (slot < 0 || slot >= slot_count(config)) throw ConfigError("slot index out of range");
    if (config.carry_over) {
        ScenarioConfig prefix = config;
        prefix.slots = slot + 1;
        return run_round(prefix).slots.back();
    }
    const Schedule schedule = half_duplex_schedule(config.topology);
    const int round = slot / static_cast<int>(schedule.slots.size());
    return solve_slot(config, schedule, slot, sample_round_flows(config, round), sample_slot_energy(config, slot));
}

RoundResult run_round(const ScenarioConfig& config) {
    const Schedule schedule = half_duplex_schedule(config.topology);
    const int per_round = static_cast<int>(schedule.slots.size());
    const int total = slot_count(config);

    RoundResult result;
    Eigen::VectorXd flows;
    Eigen::VectorXd leftover;
    double cumulative = 0.0;
    for (int slot = 0; slot < total; ++slot) {
        if (slot % per_round == 0) flows = sample_round_flows(config, slot / per_round);
        EnergyState energy = sample_slot_energy(config, slot);
        if (config.carry_over && leftover.size()) {
            energy.available = (energy.available + leftover).cwiseMin(energy.battery_capacity);
        }
        SlotOutcome outcome = solve_slot(config, schedule, slot, flows, energy);

        leftover = energy.available;
        if (outcome.solution) {
            const SlotProblem& p = outcome.problem;
            const Solution& sol = *outcome.solution;
            for (Eigen::Index l = 0; l < p.links(); ++l) {
                leftover(static_cast<Eigen::Index>(p.owner[static_cast<std::size_t>(l)])) -= sol.power(l);
            }
            for (Eigen::Index q = 0; q < p.transfer_count(); ++q) {
                const TransferLink& t = p.transfers[static_cast<std::size_t>(q)];
                leftover(static_cast<Eigen::Index>(t.donor)) -= sol.transfer(q);
                leftover(static_cast<Eigen::Index>(t.recipient)) += t.efficiency * sol.transfer(q);
            }
            leftover = leftover.cwiseMax(0.0);
        }

        cumulative += outcome.delay;
        result.cumulative_delay.push_back(cumulative);
        result.slots.push_back(std::move(outcome));
    }
    return result;
}

std::filesystem::path summary_path_for(const std::filesystem::path& links_path) {
    std::filesystem::path out = links_path;
    out.replace_filename(links_path.stem().string() + "_summary" + links_path.extension().string());
    return out;
}

void export_results(const RoundResult& result, const std::filesystem::path& links_path,
                    const std::filesystem::path& summary_path) {
    std::ofstream links(links_path);
    if (!links) throw IoError(links_path.string(), "cannot open for writing");
    links << "slot,link,flow,power,sinr,capacity_approx,capacity_exact,delay,transferred_in,lambda_node,feasible\n";
    for (const SlotOutcome& s : result.slots) {
        const SlotProblem& p = s.problem;
        for (Eigen::Index l = 0; l < p.links(); ++l) {
            const std::size_t owner = p.owner[static_cast<std::size_t>(l)];
            links << s.slot + 1 << ',' << p.link_name(l) << ',' << fmt(p.flows(l)) << ',';
            if (s.solution) {
                const Solution& sol = *s.solution;
                double inflow = 0.0;
                for (Eigen::Index q = 0; q < p.transfer_count(); ++q) {
                    const TransferLink& t = p.transfers[static_cast<std::size_t>(q)];
                    if (t.recipient == owner) inflow += t.efficiency * sol.transfer(q);
                }
                links << fmt(sol.power(l)) << ',' << fmt(sol.sinr(l)) << ',' << fmt(sol.capacity_approx(l)) << ','
                      << fmt(sol.capacity_exact(l)) << ',' << fmt(sol.delay(l)) << ',' << fmt(inflow) << ','
                      << fmt(sol.lambda(static_cast<Eigen::Index>(owner))) << ",1\n";
            } else {
                links << "nan,nan,nan,nan,nan,nan,nan,0\n";
            }
        }
    }
    if (!links) throw IoError(links_path.string(), "write failed");

    std::ofstream summary(summary_path);
    if (!summary) throw IoError(summary_path.string(), "cannot open for writing");
    summary << "slot,delay,cumulative_delay,feasible,min_sinr,low_sinr_links\n";
    for (std::size_t i = 0; i < result.slots.size(); ++i) {
        const SlotOutcome& s = result.slots[i];
        std::size_t low = 0;
        if (s.solution) {
            for (const auto& w : s.solution->warnings) low += w.find("SINR") != std::string::npos;
        }
        summary << s.slot + 1 << ',' << fmt(s.delay) << ',' << fmt(result.cumulative_delay[i]) << ','
                << (s.feasible ? 1 : 0) << ',' << fmt(s.min_sinr) << ',' << low << '\n';
    }
    if (!summary) throw IoError(summary_path.string(), "write failed");
}

}  // namespace ehwsn
