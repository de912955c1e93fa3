#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ehwsn/feasibility.hpp"
#include "ehwsn/oracle.hpp"
#include "ehwsn/scenario.hpp"
#include "ehwsn/serialization.hpp"
#include "ehwsn/solver.hpp"

namespace {

using namespace ehwsn;

struct Overrides {
    std::string config;
    std::string channel;
    std::string transfer;
    std::optional<std::uint64_t> seed_gains;
    std::optional<std::uint64_t> seed_flows;
    std::optional<std::uint64_t> seed_energy;
    std::optional<double> tol;
    std::optional<int> slots;
};

void add_scenario_flags(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
    app->add_option("--channel", o.channel, "oc or ifc")->check(CLI::IsMember({"oc", "ifc"}));
    app->add_option("--transfer", o.transfer, "on or off")->check(CLI::IsMember({"on", "off"}));
    app->add_option("--seed-gains", o.seed_gains);
    app->add_option("--seed-flows", o.seed_flows);
    app->add_option("--seed-energy", o.seed_energy);
    app->add_option("--tol", o.tol, "barrier gap tolerance")->check(CLI::PositiveNumber);
    app->add_option("--slots", o.slots, "slots to simulate")->check(CLI::PositiveNumber);
}

ScenarioConfig load(const Overrides& o) {
    ScenarioConfig config = load_config(o.config);
    if (!o.channel.empty()) config.channel = o.channel == "oc" ? ChannelMode::orthogonal : ChannelMode::interference;
    if (!o.transfer.empty()) config.transfer = o.transfer == "on" ? TransferMode::on : TransferMode::off;
    if (o.seed_gains) config.seeds.gains = *o.seed_gains;
    if (o.seed_flows) config.seeds.flows = *o.seed_flows;
    if (o.seed_energy) config.seeds.energy = *o.seed_energy;
    if (o.tol) config.solver.barrier.gap_tolerance = *o.tol;
    if (o.slots) config.slots = *o.slots;
    return config;
}

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_outcome(const SlotOutcome& s) {
    std::cout << "slot " << s.slot + 1 << ": " << (s.feasible ? "feasible" : "infeasible") << ", delay "
              << g6(s.delay) << '\n';
    if (s.solution) {
        const Solution& sol = *s.solution;
        const SlotProblem& p = s.problem;
        for (Eigen::Index l = 0; l < p.links(); ++l) {
            std::cout << "  " << p.link_name(l) << "  d=" << g6(p.flows(l)) << "  p=" << g6(sol.power(l))
                      << "  sinr=" << g6(sol.sinr(l)) << "  delay=" << g6(sol.delay(l)) << '\n';
        }
        for (Eigen::Index q = 0; q < p.transfer_count(); ++q) {
            const TransferLink& t = p.transfers[static_cast<std::size_t>(q)];
            std::cout << "  " << p.node_name(t.donor) << "->" << p.node_name(t.recipient)
                      << "  x=" << g6(sol.transfer(q)) << '\n';
        }
        std::cout << "  kkt stationarity " << g6(s.kkt_stationarity) << ", slackness " << g6(s.kkt_slackness)
                  << '\n';
    }
    for (const std::string& d : s.diagnostics) std::cout << "  note: " << d << '\n';
}

int cmd_solve(const Overrides& o, int slot, const std::string& out, const std::string& save,
              const std::string& log) {
    const ScenarioConfig config = load(o);
    const SlotOutcome outcome = run_slot(config, slot - 1);
    print_outcome(outcome);
    if (!out.empty()) {
        RoundResult r;
        r.cumulative_delay.push_back(outcome.delay);
        r.slots.push_back(outcome);
        export_results(r, out, summary_path_for(out));
    }
    if (outcome.solution) {
        if (!save.empty()) save_solution(save, outcome.problem, *outcome.solution);
        if (!log.empty()) write_trace(log, *outcome.solution);
    }
    if (!outcome.feasible) throw ProblemInfeasible(check_problem_feasible(outcome.problem));
    return 0;
}

int cmd_round(const Overrides& o, const std::string& out) {
    const ScenarioConfig config = load(o);
    const RoundResult result = run_round(config);
    for (std::size_t i = 0; i < result.slots.size(); ++i) {
        const SlotOutcome& s = result.slots[i];
        std::cout << "slot " << s.slot + 1 << "  delay " << g6(s.delay) << "  cumulative "
                  << g6(result.cumulative_delay[i]) << (s.feasible ? "" : "  (infeasible)") << '\n';
    }
    if (!out.empty()) export_results(result, out, summary_path_for(out));
    return 0;
}

int cmd_oracle(const Overrides& o, int slot, int grid, const std::string& out) {
    const ScenarioConfig config = load(o);
    const Schedule schedule = half_duplex_schedule(config.topology);
    const int round = (slot - 1) / static_cast<int>(schedule.slots.size());
    const SlotProblem problem = build_slot_problem(config, schedule, slot - 1, sample_round_flows(config, round),
                                                   sample_slot_energy(config, slot - 1));
    GridSpec spec;
    spec.power_points = grid;
    spec.transfer_points = grid;
    const bool with_transfer = config.transfer == TransferMode::on && !problem.transfers.empty();
    const OracleResult best = brute_force_solve(problem, spec, with_transfer);

    std::ostringstream csv;
    csv << "value";
    for (Eigen::Index l = 0; l < problem.links(); ++l) csv << ",p_" << problem.link_name(l);
    for (Eigen::Index q = 0; q < problem.transfer_count(); ++q) csv << ",x" << q + 1;
    csv << '\n' << g6(best.value);
    for (Eigen::Index l = 0; l < best.log_power.size(); ++l) csv << ',' << g6(std::exp(best.log_power(l)));
    for (Eigen::Index q = 0; q < best.transfer.size(); ++q) csv << ',' << g6(best.transfer(q));
    csv << '\n';

    if (out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(out);
        if (!f) throw IoError(out, "cannot open for writing");
        f << csv.str();
    }
    return 0;
}

int cmd_check(const std::string& path, double tol) {
    const StoredSolution stored = load_solution(path);
    const KktReport report = kkt_report(stored.problem, stored.solution);
    std::cout << kkt_to_json(report) << '\n';
    const double spread = report.lemma2_max_spread.value_or(0.0);
    const bool rates_inactive = stored.solution.beta.isZero() && report.lemma1_max_beta <= tol;
    if (report.max_stationarity() > tol || report.max_slackness() > tol || !rates_inactive ||
        report.min_dual < -1e-9 || spread > tol) {
        throw Error(ErrorCategory::kkt, "KKT residuals exceed " + g6(tol));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-minimizing power allocation and energy transfer for energy-harvesting WSNs"};
    app.require_subcommand(1);

    Overrides solve_o, round_o, oracle_o;
    int slot = 1;
    int oracle_slot = 1;
    int grid = 12;
    std::string solve_out, round_out, oracle_out, save, log, solution;
    double kkt_tol = 1e-5;

    CLI::App* solve = app.add_subcommand("solve", "solve one slot");
    add_scenario_flags(solve, solve_o);
    solve->add_option("--slot", slot, "1-based slot index")->check(CLI::PositiveNumber);
    solve->add_option("--out", solve_out, "per-link CSV (summary goes next to it)");
    solve->add_option("--save", save, "write problem and solution as JSON");
    solve->add_option("--log", log, "write the barrier trace as JSON lines");

    CLI::App* round = app.add_subcommand("round", "simulate a data collection round");
    add_scenario_flags(round, round_o);
    round->add_option("--out", round_out, "per-link CSV (summary goes next to it)");

    CLI::App* oracle = app.add_subcommand("oracle", "brute-force one small slot");
    add_scenario_flags(oracle, oracle_o);
    oracle->add_option("--slot", oracle_slot, "1-based slot index")->check(CLI::PositiveNumber);
    oracle->add_option("--grid", grid, "samples per dimension")->check(CLI::Range(2, 200));
    oracle->add_option("--out", oracle_out, "CSV row destination");

    CLI::App* check = app.add_subcommand("check", "KKT report on a stored solution");
    check->add_option("--solution", solution, "JSON written by solve --save")->required();
    check->add_option("--kkt-tol", kkt_tol)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error[usage]: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*solve) return cmd_solve(solve_o, slot, solve_out, save, log);
        if (*round) return cmd_round(round_o, round_out);
        if (*oracle) return cmd_oracle(oracle_o, oracle_slot, grid, oracle_out);
        return cmd_check(solution, kkt_tol);
    } catch (const Error& e) {
        std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 10;
    }
}
