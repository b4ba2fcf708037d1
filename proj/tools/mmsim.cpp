// mmsim: scenario execution, invariant verification, Markov ensemble
// simulation, successor enumeration, and manifestation checking, with
// machine-readable JSON reports.  Exit codes: 0 success, 1 a check or
// invariant failed, 2 usage or input error.

#include "verify.hpp"

#include "manyminds/apriori.hpp"
#include "manyminds/causal.hpp"
#include "manyminds/geometry.hpp"
#include "manyminds/process.hpp"
#include "manyminds/scenarios.hpp"
#include "manyminds/serialize.hpp"
#include "manyminds/structures.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CommonConfig {
    std::uint64_t seed = 1;
    std::uint64_t trajectories = 1000;
    std::uint64_t max_steps = 10000;
    std::vector<std::string> tol_overrides;
    std::string out_path;
    std::string format = "json";
    std::string config_path;

    mm::quantum::Tolerances tolerances() const {
        mm::quantum::Tolerances tol;
        for (const std::string& entry : tol_overrides) {
            auto eq = entry.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--tol expects name=value, got '" + entry + "'");
            std::string name = entry.substr(0, eq);
            double value = std::stod(entry.substr(eq + 1));
            if (value <= 0) throw CLI::ValidationError("tolerance overrides must be positive");
            if (name == "eig_cutoff") tol.eig_cutoff = value;
            else if (name == "support_leak") tol.support_leak = value;
            else if (name == "projection") tol.projection = value;
            else if (name == "state") tol.state = value;
            else if (name == "decoherence") tol.decoherence = value;
            else if (name == "decoherence_soft") tol.decoherence_soft = value;
            else throw CLI::ValidationError("unknown tolerance '" + name + "'");
        }
        return tol;
    }

    json echo() const {
        json j;
        j["seed"] = seed;
        j["trajectories"] = trajectories;
        j["max_steps"] = max_steps;
        j["format"] = format;
        if (!tol_overrides.empty()) j["tol"] = tol_overrides;
        return j;
    }
};

// Config file values fill in any flag the user did not pass explicitly.
void apply_config_file(CommonConfig& config, const CLI::App& cmd) {
    if (config.config_path.empty()) return;
    std::ifstream in(config.config_path);
    if (!in) throw CLI::ValidationError("cannot read config file " + config.config_path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw CLI::ValidationError("config file is not valid JSON");
    if (cmd.count("--seed") == 0 && j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (cmd.count("--trajectories") == 0 && j.contains("trajectories"))
        config.trajectories = j["trajectories"].get<std::uint64_t>();
    if (cmd.count("--max-steps") == 0 && j.contains("max_steps"))
        config.max_steps = j["max_steps"].get<std::uint64_t>();
    if (cmd.count("--out") == 0 && j.contains("out")) config.out_path = j["out"].get<std::string>();
    if (cmd.count("--format") == 0 && j.contains("format"))
        config.format = j["format"].get<std::string>();
    if (j.contains("tol"))
        for (const auto& [name, value] : j["tol"].items())
            config.tol_overrides.push_back(name + "=" + std::to_string(value.get<double>()));
}

void add_common_flags(CLI::App* cmd, CommonConfig& config) {
    cmd->add_option("--seed", config.seed, "master seed for sampled runs");
    cmd->add_option("--trajectories", config.trajectories, "trajectory count for sampled runs");
    cmd->add_option("--max-steps", config.max_steps, "per-trajectory step limit");
    cmd->add_option("--tol", config.tol_overrides, "tolerance override name=value")
        ->type_name("NAME=VALUE");
    cmd->add_option("--out", config.out_path, "write the report to this file");
    cmd->add_option("--format", config.format, "report format (json or csv)")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--config", config.config_path, "JSON config file; flags take precedence");
}

// The report always reaches a JSON sink: the --out file when given (stdout
// then carries a short human summary), stdout otherwise.
void emit_report(const CommonConfig& config, const json& report, const std::string& summary) {
    std::string payload = report.dump(2) + "\n";
    if (!config.out_path.empty()) {
        std::ofstream out(config.out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + config.out_path);
        out << payload;
        std::cout << summary;
    } else {
        std::cout << payload;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---------------------------------------------------------------------------
// scenario

int cmd_scenario(const std::string& name, const CommonConfig& config,
                 const mm::scenarios::ScenarioParams& params) {
    const auto& registry = mm::scenarios::scenario_registry();
    auto it = registry.find(name);
    if (it == registry.end()) {
        std::cerr << "unknown scenario '" << name << "'; available:";
        for (const auto& known : mm::scenarios::scenario_names()) std::cerr << ' ' << known;
        std::cerr << '\n';
        return kExitUsage;
    }
    mm::scenarios::ScenarioReport report = it->second(params);

    json out = json::parse(mm::serialize::to_json(report));
    out["schema_version"] = kSchemaVersion;
    out["command"] = "scenario";
    out["config"] = config.echo();

    std::ostringstream summary;
    for (const auto& check : report.checks)
        summary << (check.pass ? "PASS" : "FAIL") << ' ' << check.key << '\n';
    summary << (report.pass ? "PASS" : "FAIL") << " scenario " << name << '\n';
    emit_report(config, out, summary.str());
    return report.pass ? 0 : kExitFailure;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const CommonConfig& config, const std::string& inject) {
    mmsim::VerifyOptions options;
    options.seed = config.seed;
    options.tol = config.tolerances();
    options.inject_failure = inject;
    std::vector<mmsim::InvariantResult> results = mmsim::run_verify_suite(options);

    bool all_pass = true;
    json checks = json::array();
    std::ostringstream summary;
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        json e;
        e["name"] = r.name;
        e["pass"] = r.pass;
        e["detail"] = r.detail;
        checks.push_back(std::move(e));
        summary << (r.pass ? "PASS" : "FAIL") << ' ' << r.name << " -- " << r.detail << '\n';
    }
    summary << (all_pass ? "PASS" : "FAIL") << " verify (" << results.size() << " invariants)\n";

    json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "verify";
    report["config"] = config.echo();
    report["invariants"] = std::move(checks);
    report["pass"] = all_pass;
    emit_report(config, report, summary.str());
    return all_pass ? 0 : kExitFailure;
}

// ---------------------------------------------------------------------------
// simulate

struct JumpModel {
    std::string initial;
    struct Successor {
        std::optional<double> direct_app;
        std::vector<std::vector<mm::quantum::Matrix>> menu; // candidate sequences
    };
    struct Node {
        bool absorbing = false;
        double parent_app = 1.0;
        std::optional<mm::quantum::AlgebraState> omega;
        std::map<std::string, Successor> successors;
    };
    std::map<std::string, Node> nodes;
};

JumpModel parse_jump_model(const json& j) {
    JumpModel model;
    if (j.value("schema_version", 1) != kSchemaVersion)
        throw mm::serialize::ParseError("unsupported schema version");
    model.initial = j.at("initial").get<std::string>();
    for (const auto& [name, nj] : j.at("nodes").items()) {
        JumpModel::Node node;
        node.absorbing = nj.value("absorbing", false);
        node.parent_app = nj.value("parent_app", 1.0);
        if (nj.contains("omega")) {
            auto [matrix, space] = mm::serialize::matrix_from_json(nj["omega"].dump());
            node.omega = mm::quantum::AlgebraState(matrix, mm::quantum::AlgebraSpec::full(space));
        }
        if (nj.contains("successors"))
            for (const auto& [succ_name, sj] : nj["successors"].items()) {
                JumpModel::Successor successor;
                if (sj.contains("app")) {
                    successor.direct_app = sj["app"].get<double>();
                } else if (sj.contains("sequence")) {
                    std::vector<mm::quantum::Matrix> seq;
                    for (const auto& mj : sj["sequence"])
                        seq.push_back(mm::serialize::matrix_from_json(mj.dump()).first);
                    successor.menu.push_back(std::move(seq));
                } else if (sj.contains("menu")) {
                    for (const auto& cand : sj["menu"]) {
                        std::vector<mm::quantum::Matrix> seq;
                        for (const auto& mj : cand)
                            seq.push_back(mm::serialize::matrix_from_json(mj.dump()).first);
                        successor.menu.push_back(std::move(seq));
                    }
                } else {
                    throw mm::serialize::ParseError("successor '" + succ_name +
                                                    "' needs app, sequence, or menu");
                }
                node.successors[succ_name] = std::move(successor);
            }
        model.nodes[name] = std::move(node);
    }
    if (!model.nodes.count(model.initial))
        throw mm::serialize::ParseError("initial node is not defined");
    return model;
}

int cmd_simulate(const std::string& path, const CommonConfig& config) {
    JumpModel model;
    try {
        model = parse_jump_model(json::parse(read_file(path)));
    } catch (const std::exception& e) {
        std::cerr << "invalid model file: " << e.what() << '\n';
        return kExitUsage;
    }
    const mm::quantum::Tolerances tol = config.tolerances();

    auto successor_app = [&tol](const JumpModel::Node& node,
                                const JumpModel::Successor& successor) {
        if (successor.direct_app) return *successor.direct_app;
        if (!node.omega)
            throw mm::serialize::ParseError("state sequences need an omega at their node");
        mm::apriori::ManifestationMenu menu;
        for (const auto& seq_matrices : successor.menu) {
            mm::apriori::StateSequence seq;
            seq.omega = *node.omega;
            for (const auto& m : seq_matrices)
                seq.states.emplace_back(m, node.omega->algebra, tol);
            menu.candidates.push_back(std::move(seq));
        }
        return mm::apriori::inductive_app(menu, {}, tol).value;
    };

    json tables = json::object();
    std::map<std::string, mm::process::JumpTable> cache;
    try {
        for (const auto& [name, node] : model.nodes) {
            mm::process::JumpTable table;
            if (node.absorbing || node.successors.empty()) {
                table.absorbing = node.absorbing;
                if (!node.absorbing) table.distribution.extinction = 1.0;
            } else {
                std::map<std::string, double> apps;
                for (const auto& [succ_name, successor] : node.successors)
                    apps[succ_name] = successor_app(node, successor);
                table.distribution = mm::apriori::jump_distribution(node.parent_app, apps);
            }
            tables[name] = json::parse(mm::serialize::to_json(table.distribution));
            tables[name]["absorbing"] = table.absorbing;
            cache[name] = std::move(table);
        }
    } catch (const std::exception& e) {
        std::cerr << "model evaluation failed: " << e.what() << '\n';
        return kExitUsage;
    }

    json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "simulate";
    report["config"] = config.echo();
    report["initial"] = model.initial;
    report["jump_tables"] = std::move(tables);

    std::ostringstream summary;
    summary << "evaluated " << model.nodes.size() << " nodes\n";

    if (config.trajectories > 0) {
        auto evaluator = [&cache](const std::string& node) -> mm::process::JumpTable {
            auto it = cache.find(node);
            if (it == cache.end()) {
                mm::process::JumpTable absorbing;
                absorbing.absorbing = true;
                return absorbing;
            }
            return it->second;
        };
        mm::process::RunOptions run;
        run.trajectories = config.trajectories;
        run.max_steps = config.max_steps;
        run.seed = config.seed;
        run.keep_trajectories = config.format == "csv";
        mm::process::EnsembleResult result =
            mm::process::run_trajectories(model.initial, evaluator, run);
        report["ensemble"] = json::parse(mm::serialize::to_json(result.stats));
        summary << "sampled " << config.trajectories << " trajectories, extinction rate "
                << result.stats.extinction_rate() << '\n';
        if (config.format == "csv") {
            if (config.out_path.empty()) {
                std::cerr << "csv output requires --out\n";
                return kExitUsage;
            }
            std::ofstream out(config.out_path, std::ios::binary);
            out << mm::serialize::trajectories_to_csv(result.trajectories);
            std::cout << report.dump(2) << '\n';
            return 0;
        }
    }
    emit_report(config, report, summary.str());
    return 0;
}

// ---------------------------------------------------------------------------
// structures enum

int cmd_structures_enum(const std::string& path, const std::string& alphabet_letters,
                        std::uint64_t max_enum, const CommonConfig& config) {
    mm::structures::SwitchingStructure s;
    try {
        s = path.empty() ? mm::structures::minimal_structure()
                         : mm::serialize::structure_from_json(read_file(path));
    } catch (const std::exception& e) {
        std::cerr << "invalid structure file: " << e.what() << '\n';
        return kExitUsage;
    }
    auto validation = mm::structures::validate(s);
    if (!validation.valid()) {
        std::cerr << "structure is invalid: " << validation.issues.front().message << '\n';
        return kExitUsage;
    }

    mm::structures::SuccessorOptions options;
    options.max_results = max_enum;
    options.alphabet.clear();
    for (char c : alphabet_letters) {
        switch (c) {
            case 'P': options.alphabet.push_back(mm::causal::Relation::Past); break;
            case 'S': options.alphabet.push_back(mm::causal::Relation::Spacelike); break;
            case 'F': options.alphabet.push_back(mm::causal::Relation::Future); break;
            default:
                std::cerr << "alphabet letters must be drawn from PSF\n";
                return kExitUsage;
        }
    }

    json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "structures enum";
    report["config"] = config.echo();
    report["alphabet"] = alphabet_letters;
    report["structure"] = json::parse(mm::serialize::to_json(s));

    std::ostringstream summary;
    std::size_t b1 = 0;
    std::set<mm::structures::CanonicalForm> xi;
    try {
        auto one_det_list = mm::structures::determination_successors(s, options);
        b1 = one_det_list.size();
        for (const auto& succ : one_det_list) xi.insert(mm::structures::canonicalize(succ));
    } catch (const mm::structures::EnumerationOverflow& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    }
    report["one_determination_ordered"] = b1;
    summary << "one-new-determination successors: " << b1 << '\n';

    std::uint64_t new_switch_bound = mm::structures::successor_candidate_bound(s, true, options);
    if (new_switch_bound <= max_enum) {
        auto new_switch_list = mm::structures::switch_successors(s, options);
        report["new_switch_ordered"] = new_switch_list.size();
        for (const auto& succ : new_switch_list) xi.insert(mm::structures::canonicalize(succ));
        summary << "new-switch successors: " << new_switch_list.size() << '\n';
        report["xi"] = xi.size();
        summary << "immediate successors up to relabeling: " << xi.size() << '\n';
    } else {
        report["new_switch_ordered"] = "skipped";
        report["new_switch_candidate_bound"] = new_switch_bound;
        summary << "new-switch successors: skipped (candidate bound " << new_switch_bound
                << " exceeds --max-enum " << max_enum << ")\n";
        report["xi_one_determination_only"] = xi.size();
        summary << "immediate successors up to relabeling (b1 only): " << xi.size() << '\n';
    }

    emit_report(config, report, summary.str());
    return 0;
}

// ---------------------------------------------------------------------------
// geometry check

int cmd_geometry_check(const std::string& path, const CommonConfig& config,
                       double samples_per_unit) {
    json input;
    mm::structures::SwitchingStructure s;
    mm::geometry::Manifestation m;
    mm::quantum::ProjectionRegistry registry;
    bool have_registry = false;
    try {
        input = json::parse(read_file(path));
        s = mm::serialize::structure_from_json(input.at("structure").dump());
        m = mm::serialize::manifestation_from_json(input.at("manifestation").dump());
        if (input.contains("pairs")) {
            have_registry = true;
            for (const auto& pair : input["pairs"]) {
                auto [p, ps] = mm::serialize::matrix_from_json(pair.at("open").dump());
                auto [q, qs] = mm::serialize::matrix_from_json(pair.at("closed").dump());
                registry.add(mm::quantum::ProjectionPair(p, q, config.tolerances()));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "invalid manifestation file: " << e.what() << '\n';
        return kExitUsage;
    }

    mm::geometry::CheckOptions options;
    options.samples_per_unit_time = samples_per_unit;
    mm::geometry::ManifestationReport result =
        mm::geometry::check_manifestation(m, s, options, have_registry ? &registry : nullptr);

    json report = json::parse(mm::serialize::to_json(result));
    report["schema_version"] = kSchemaVersion;
    report["command"] = "geometry check";
    report["config"] = config.echo();
    report["samples_per_unit_time"] = samples_per_unit;

    std::ostringstream summary;
    for (const auto& clause : result.clauses)
        summary << (clause.pass ? "PASS" : "FAIL") << ' ' << clause.clause
                << (clause.detail.empty() ? "" : " -- " + clause.detail) << '\n';
    summary << (result.pass ? "PASS" : "FAIL") << " manifestation\n";
    emit_report(config, report, summary.str());
    return result.pass ? 0 : kExitFailure;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    return values;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"many-minds switching-structure simulator"};
    app.require_subcommand(1);

    CommonConfig config;

    auto* scenario_cmd = app.add_subcommand("scenario", "run a registered scenario suite");
    std::string scenario_name;
    scenario_cmd->add_option("name", scenario_name, "scenario name")->required();
    std::string p_arg, q_arg, x_arg, variant_arg;
    std::vector<std::string> param_args;
    scenario_cmd->add_option("--p", p_arg, "probability or comma list");
    scenario_cmd->add_option("--q", q_arg, "second rate");
    scenario_cmd->add_option("--x", x_arg, "delay rate");
    scenario_cmd->add_option("--variant", variant_arg, "caricature variant (A, B, C)");
    scenario_cmd->add_option("--param", param_args, "extra parameter name=value")
        ->type_name("NAME=VALUE");
    add_common_flags(scenario_cmd, config);

    auto* verify_cmd = app.add_subcommand("verify", "run every module's invariant suite");
    std::string inject;
    verify_cmd->add_option("--inject-failure", inject, "force the named invariant to fail")
        ->group("");
    add_common_flags(verify_cmd, config);

    auto* simulate_cmd = app.add_subcommand("simulate", "sample the jump process of a model file");
    std::string simulate_path;
    simulate_cmd->add_option("file", simulate_path, "jump model JSON file")->required();
    add_common_flags(simulate_cmd, config);

    auto* structures_cmd = app.add_subcommand("structures", "switching-structure utilities");
    auto* enum_cmd = structures_cmd->add_subcommand("enum", "count immediate successors");
    std::string structure_path;
    std::string alphabet = "PSF";
    std::uint64_t max_enum = 2000000;
    enum_cmd->add_option("file", structure_path,
                         "structure JSON file (defaults to the minimal structure)");
    enum_cmd->add_option("--alphabet", alphabet, "relation letters for new rows (subset of PSF)");
    enum_cmd->add_option("--max-enum", max_enum, "refuse enumerations beyond this bound");
    add_common_flags(enum_cmd, config);

    auto* geometry_cmd = app.add_subcommand("geometry", "manifestation utilities");
    auto* check_cmd = geometry_cmd->add_subcommand("check", "clause-by-clause constraint report");
    std::string manifestation_path;
    double samples_per_unit = 64.0;
    check_cmd->add_option("file", manifestation_path, "manifestation JSON file")->required();
    check_cmd->add_option("--samples-per-unit", samples_per_unit, "tube sampling density");
    add_common_flags(check_cmd, config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (scenario_cmd->parsed()) {
            apply_config_file(config, *scenario_cmd);
            mm::scenarios::ScenarioParams params;
            params.seed = config.seed;
            params.trials = config.trajectories;
            params.tol = config.tolerances();
            if (!p_arg.empty()) {
                params.p_list = parse_list(p_arg);
                if (params.p_list.size() == 1) params.numbers["p"] = params.p_list.front();
            }
            if (!q_arg.empty()) params.numbers["q"] = std::stod(q_arg);
            if (!x_arg.empty()) params.numbers["x"] = std::stod(x_arg);
            if (!variant_arg.empty()) params.strings["variant"] = variant_arg;
            for (const std::string& entry : param_args) {
                auto eq = entry.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "--param expects name=value\n";
                    return kExitUsage;
                }
                std::string name = entry.substr(0, eq);
                std::string value = entry.substr(eq + 1);
                try {
                    std::size_t used = 0;
                    double number = std::stod(value, &used);
                    if (used == value.size()) params.numbers[name] = number;
                    else params.strings[name] = value;
                } catch (...) {
                    params.strings[name] = value;
                }
            }
            return cmd_scenario(scenario_name, config, params);
        }
        if (verify_cmd->parsed()) {
            apply_config_file(config, *verify_cmd);
            return cmd_verify(config, inject);
        }
        if (simulate_cmd->parsed()) {
            apply_config_file(config, *simulate_cmd);
            return cmd_simulate(simulate_path, config);
        }
        if (structures_cmd->parsed() && enum_cmd->parsed()) {
            apply_config_file(config, *enum_cmd);
            return cmd_structures_enum(structure_path, alphabet, max_enum, config);
        }
        if (geometry_cmd->parsed() && check_cmd->parsed()) {
            apply_config_file(config, *check_cmd);
            return cmd_geometry_check(manifestation_path, config, samples_per_unit);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    std::cerr << "no subcommand given\n";
    return kExitUsage;
}
