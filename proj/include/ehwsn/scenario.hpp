#ifndef EHWSN_SCENARIO_HPP
#define EHWSN_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ehwsn/channel.hpp"
#include "ehwsn/energy.hpp"
#include "ehwsn/problem.hpp"
#include "ehwsn/solver.hpp"
#include "ehwsn/topology.hpp"

namespace ehwsn {

enum class ChannelMode { orthogonal, interference };
enum class TransferMode { off, on };

/// Independent streams so that one factor can vary while the others stay put.
struct Seeds {
    std::uint64_t gains = 1;
    std::uint64_t flows = 2;
    std::uint64_t energy = 3;
};

struct Distributions {
    double energy_rate = 8.0;        ///< Poisson mean of per-slot harvest
    double battery_capacity = 20.0;
    double max_flow = 1.0;           ///< flows ~ U(0, max_flow]
    GainDistribution gains;
};

/// Values pinned in the config file; anything missing is sampled.
struct ExplicitValues {
    std::map<NodeId, double> flows;   ///< by transmitting node
    std::map<NodeId, double> energy;  ///< by node, applied every slot
    std::map<int, Eigen::MatrixXd> gains;  ///< by zero-based slot, active-link order
};

struct ScenarioConfig {
    explicit ScenarioConfig(Topology t) : topology(std::move(t)) {}

    Topology topology;
    ChannelMode channel = ChannelMode::interference;
    TransferMode transfer = TransferMode::on;
    Seeds seeds;
    Distributions distributions;
    SolverOptions solver;
    int slots = 0;            ///< slots to simulate; 0 means one full round
    bool carry_over = false;  ///< unused energy stays in the battery
    ExplicitValues explicit_values;
};

/// Everything recorded for one slot, solved or not.
struct SlotOutcome {
    int slot = 0;                          ///< zero-based position in the run
    std::vector<std::size_t> data_links;   ///< topology data-link indices, problem order
    std::vector<std::size_t> energy_links; ///< topology energy-link indices, problem order
    SlotProblem problem;
    std::optional<Solution> solution;
    bool feasible = false;
    double delay = 0.0;  ///< +infinity for infeasible slots
    std::vector<std::string> diagnostics;
    double min_sinr = 0.0;
    double kkt_stationarity = 0.0;
    double kkt_slackness = 0.0;
};

struct RoundResult {
    std::vector<SlotOutcome> slots;
    std::vector<double> cumulative_delay;
};

/// Number of slots a run covers (config.slots or one schedule round).
int slot_count(const ScenarioConfig& config);

/// Slot problem for `slot` with the given flows (per topology data link) and
/// node energies. Channel mode and transfer mode are applied here.
SlotProblem build_slot_problem(const ScenarioConfig& config, const Schedule& schedule, int slot,
                               const Eigen::VectorXd& flows, const EnergyState& energy,
                               std::vector<std::size_t>* energy_links = nullptr);

/// Flows of the round that contains `slot`, one per topology data link.
Eigen::VectorXd sample_round_flows(const ScenarioConfig& config, int round);
/// Fresh harvest for `slot`, explicit values applied.
EnergyState sample_slot_energy(const ScenarioConfig& config, int slot);

SlotOutcome run_slot(const ScenarioConfig& config, int slot);
RoundResult run_round(const ScenarioConfig& config);

/// Per-link CSV and per-slot summary CSV, values printed with %.6g.
void export_results(const RoundResult& result, const std::filesystem::path& links_path,
                    const std::filesystem::path& summary_path);

/// `out.csv` -> `out_summary.csv`.
std::filesystem::path summary_path_for(const std::filesystem::path& links_path);

}  // namespace ehwsn

#endif  // EHWSN_SCENARIO_HPP
