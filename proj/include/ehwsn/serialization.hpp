#ifndef EHWSN_SERIALIZATION_HPP
#define EHWSN_SERIALIZATION_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "ehwsn/feasibility.hpp"
#include "ehwsn/scenario.hpp"
#include "ehwsn/solver.hpp"

namespace ehwsn {

inline constexpr int kSchemaVersion = 1;

/// Scenario config (JSON). Throws ConfigError on schema problems and
/// TopologyError on an invalid topology.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// A slot problem together with its solution, as written by `solve --save`.
struct StoredSolution {
    SlotProblem problem;
    Solution solution;
};

std::string stored_solution_to_json(const SlotProblem& problem, const Solution& solution);
StoredSolution parse_stored_solution(std::string_view text);
void save_solution(const std::filesystem::path& path, const SlotProblem& problem, const Solution& solution);
StoredSolution load_solution(const std::filesystem::path& path);

std::string feasibility_to_json(const FeasibilityReport& report);
std::string kkt_to_json(const KktReport& report);

/// One JSON object per outer barrier iteration.
void write_trace(const std::filesystem::path& path, const Solution& solution);

}  // namespace ehwsn

#endif  // EHWSN_SERIALIZATION_HPP
