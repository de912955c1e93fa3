#include "ehwsn/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ehwsn {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << text;
    if (!out) throw IoError(path.string(), "write failed");
}

json to_json_vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json to_json_mat(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const Eigen::VectorXd row = m.row(r).transpose();
        rows.push_back(to_json_vec(row));
    }
    return rows;
}

Eigen::MatrixXd mat_from(const json& j) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = n ? static_cast<Eigen::Index>(rows.front().size()) : 0;
    Eigen::MatrixXd out(n, m);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != m) {
            throw ConfigError("matrix rows differ in length");
        }
        for (Eigen::Index c = 0; c < m; ++c) out(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return out;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

void check_version(const json& doc) {
    if (!doc.contains("schema_version")) throw ConfigError("missing schema_version");
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(version));
    }
}

Topology parse_topology(const json& t) {
    std::vector<NodeId> nodes = t.at("nodes").get<std::vector<NodeId>>();
    std::vector<DataLink> data;
    for (const json& l : t.at("data_links")) data.push_back({l.at("from").get<NodeId>(), l.at("to").get<NodeId>()});
    const double default_eff = get_or(t, "default_efficiency", 1.0);
    std::vector<EnergyLink> energy;
    if (t.contains("energy_links")) {
        for (const json& l : t.at("energy_links")) {
            energy.push_back({l.at("from").get<NodeId>(), l.at("to").get<NodeId>(), get_or(l, "efficiency", default_eff)});
        }
    }
    return Topology(std::move(nodes), std::move(data), std::move(energy));
}

ChannelMode parse_channel(const std::string& s) {
    if (s == "ifc" || s == "interference") return ChannelMode::interference;
    if (s == "oc" || s == "orthogonal") return ChannelMode::orthogonal;
    throw ConfigError("channel must be oc or ifc, got '" + s + "'");
}

TransferMode parse_transfer(const std::string& s) {
    if (s == "on") return TransferMode::on;
    if (s == "off") return TransferMode::off;
    throw ConfigError("transfer must be on or off, got '" + s + "'");
}

template <typename T>
std::map<NodeId, T> node_map(const json& j) {
    std::map<NodeId, T> out;
    for (const auto& [key, value] : j.items()) out[std::stoi(key)] = value.template get<T>();
    return out;
}

json problem_to_json(const SlotProblem& p) {
    json transfers = json::array();
    for (const TransferLink& t : p.transfers) {
        transfers.push_back({{"donor", t.donor}, {"recipient", t.recipient}, {"efficiency", t.efficiency}});
    }
    return {{"flows", to_json_vec(p.flows)},
            {"gain", to_json_mat(p.channel.gain)},
            {"noise", to_json_vec(p.channel.noise)},
            {"owner", p.owner},
            {"energy", to_json_vec(p.energy)},
            {"transfers", transfers},
            {"link_labels", p.link_labels},
            {"node_labels", p.node_labels}};
}

SlotProblem problem_from_json(const json& j) {
    SlotProblem p;
    p.flows = vec_from(j.at("flows"));
    p.channel.gain = mat_from(j.at("gain"));
    p.channel.noise = vec_from(j.at("noise"));
    p.owner = j.at("owner").get<std::vector<std::size_t>>();
    p.energy = vec_from(j.at("energy"));
    for (const json& t : j.at("transfers")) {
        p.transfers.push_back({t.at("donor").get<std::size_t>(), t.at("recipient").get<std::size_t>(),
                               t.at("efficiency").get<double>()});
    }
    p.link_labels = get_or(j, "link_labels", std::vector<std::string>{});
    p.node_labels = get_or(j, "node_labels", std::vector<std::string>{});
    p.validate();
    return p;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        check_version(doc);
        check_keys(doc, "config", {"schema_version", "topology", "scenario", "solver", "explicit"});
        if (doc.contains("topology")) {
            check_keys(doc.at("topology"), "topology", {"nodes", "data_links", "energy_links", "default_efficiency"});
        }
        ScenarioConfig config(parse_topology(doc.at("topology")));
        const json scenario = doc.value("scenario", json::object());
        check_keys(scenario, "scenario",
                   {"channel", "transfer", "seeds", "energy_rate", "battery_capacity", "max_flow",
                    "max_interference_gain", "noise", "slots", "carry_over"});
        config.channel = parse_channel(get_or<std::string>(scenario, "channel", "ifc"));
        config.transfer = parse_transfer(get_or<std::string>(scenario, "transfer", "on"));
        if (scenario.contains("seeds")) {
            const json& s = scenario.at("seeds");
            config.seeds.gains = get_or(s, "gains", config.seeds.gains);
            config.seeds.flows = get_or(s, "flows", config.seeds.flows);
            config.seeds.energy = get_or(s, "energy", config.seeds.energy);
        }
        auto& dist = config.distributions;
        dist.energy_rate = get_or(scenario, "energy_rate", dist.energy_rate);
        dist.battery_capacity = get_or(scenario, "battery_capacity", dist.battery_capacity);
        dist.max_flow = get_or(scenario, "max_flow", dist.max_flow);
        dist.gains.max_interference_gain = get_or(scenario, "max_interference_gain", dist.gains.max_interference_gain);
        dist.gains.noise = get_or(scenario, "noise", dist.gains.noise);
        config.slots = get_or(scenario, "slots", config.slots);
        config.carry_over = get_or(scenario, "carry_over", config.carry_over);

        const json solver = doc.value("solver", json::object());
        check_keys(solver, "solver",
                   {"gap_tolerance", "max_outer_iterations", "max_newton_iterations", "rate_margin",
                    "transfer_penalty", "high_sinr_threshold"});
        auto& so = config.solver;
        so.barrier.gap_tolerance = get_or(solver, "gap_tolerance", so.barrier.gap_tolerance);
        so.barrier.max_outer_iterations = get_or(solver, "max_outer_iterations", so.barrier.max_outer_iterations);
        so.barrier.max_newton_iterations = get_or(solver, "max_newton_iterations", so.barrier.max_newton_iterations);
        so.rate_margin = get_or(solver, "rate_margin", so.rate_margin);
        so.transfer_penalty = get_or(solver, "transfer_penalty", so.transfer_penalty);
        so.high_sinr_threshold = get_or(solver, "high_sinr_threshold", so.high_sinr_threshold);

        if (doc.contains("explicit")) {
            const json& e = doc.at("explicit");
            check_keys(e, "explicit", {"flows", "energy", "gains"});
            if (e.contains("flows")) config.explicit_values.flows = node_map<double>(e.at("flows"));
            if (e.contains("energy")) config.explicit_values.energy = node_map<double>(e.at("energy"));
            if (e.contains("gains")) {
                for (const auto& [key, value] : e.at("gains").items()) {
                    config.explicit_values.gains[std::stoi(key)] = mat_from(value);
                }
            }
            for (const auto& [node, value] : config.explicit_values.flows) {
                if (!config.topology.uplink_of(node)) throw ConfigError("explicit flow for node without uplink");
                if (!(value > 0.0)) throw ConfigError("explicit flows must be positive");
            }
            for (const auto& [node, value] : config.explicit_values.energy) {
                if (!config.topology.contains(node)) throw ConfigError("explicit energy for unknown node");
                if (!(value > 0.0)) throw ConfigError("explicit energies must be positive");
            }
        }
        return config;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config schema: node keys must be integers (") + e.what() + ")");
    }
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string stored_solution_to_json(const SlotProblem& problem, const Solution& s) {
    json sol = {{"power", to_json_vec(s.power)},
                {"log_power", to_json_vec(s.log_power)},
                {"transfer", to_json_vec(s.transfer)},
                {"lambda", to_json_vec(s.lambda)},
                {"beta", to_json_vec(s.beta)},
                {"gamma", to_json_vec(s.gamma)},
                {"rate_multiplier", to_json_vec(s.rate_multiplier)},
                {"objective", s.objective},
                {"transfers_enabled", s.transfers_enabled},
                {"mu", s.mu},
                {"duality_gap", s.duality_gap},
                {"iterations", s.iterations},
                {"converged", s.converged},
                {"termination", s.termination},
                {"warnings", s.warnings}};
    json doc = {{"schema_version", kSchemaVersion}, {"problem", problem_to_json(problem)}, {"solution", sol}};
    return doc.dump(2);
}

StoredSolution parse_stored_solution(std::string_view text) {
    try {
        const json doc = json::parse(text);
        check_version(doc);
        StoredSolution out{problem_from_json(doc.at("problem")), {}};
        const json& s = doc.at("solution");
        Solution& sol = out.solution;
        sol.transfer = vec_from(s.at("transfer"));
        sol.lambda = vec_from(s.at("lambda"));
        sol.beta = vec_from(s.at("beta"));
        sol.gamma = vec_from(s.at("gamma"));
        sol.rate_multiplier = vec_from(s.at("rate_multiplier"));
        sol.transfers_enabled = s.at("transfers_enabled").get<bool>();
        sol.mu = s.at("mu").get<double>();
        sol.duality_gap = s.at("duality_gap").get<double>();
        sol.iterations = s.at("iterations").get<int>();
        sol.converged = s.at("converged").get<bool>();
        sol.termination = s.at("termination").get<std::string>();
        sol.warnings = s.at("warnings").get<std::vector<std::string>>();
        evaluate_links(out.problem, vec_from(s.at("log_power")), sol);
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("stored solution: ") + e.what());
    }
}

void save_solution(const std::filesystem::path& path, const SlotProblem& problem, const Solution& solution) {
    write_file(path, stored_solution_to_json(problem, solution) + "\n");
}

StoredSolution load_solution(const std::filesystem::path& path) { return parse_stored_solution(read_file(path)); }

std::string feasibility_to_json(const FeasibilityReport& r) {
    json slack = json::array();
    for (const NodeSlack& s : r.energy_slack) slack.push_back({{"node", s.node}, {"slack", s.slack}});
    json doc = {{"feasible", r.feasible()},
                {"rate_feasible", r.rate_feasible},
                {"spectral_radius", r.spectral_radius},
                {"min_power", to_json_vec(r.min_power)},
                {"energy_feasible", r.energy_feasible},
                {"energy_slack", slack},
                {"reasons", r.reasons}};
    if (r.witness_log_power) doc["witness_log_power"] = to_json_vec(*r.witness_log_power);
    return doc.dump(2);
}

std::string kkt_to_json(const KktReport& r) {
    json doc = {{"max_stationarity", r.max_stationarity()},
                {"max_slackness", r.max_slackness()},
                {"stationarity_power", to_json_vec(r.stationarity_power)},
                {"stationarity_transfer", to_json_vec(r.stationarity_transfer)},
                {"slackness_budget", to_json_vec(r.slackness_budget)},
                {"slackness_rate", to_json_vec(r.slackness_rate)},
                {"slackness_transfer", to_json_vec(r.slackness_transfer)},
                {"lemma1_max_beta", r.lemma1_max_beta},
                {"lambda_residual", to_json_vec(r.lambda_residual)},
                {"min_dual", r.min_dual}};
    doc["lemma2_max_spread"] = r.lemma2_max_spread ? json(*r.lemma2_max_spread) : json("n/a");
    return doc.dump(2);
}

void write_trace(const std::filesystem::path& path, const Solution& solution) {
    std::ostringstream out;
    for (const BarrierRecord& r : solution.trace) {
        out << json{{"outer", r.outer}, {"mu", r.mu}, {"objective", r.objective}, {"residual", r.residual},
                    {"newton_steps", r.newton_steps}}
                   .dump()
            << '\n';
    }
    write_file(path, out.str());
}

}  // namespace ehwsn
