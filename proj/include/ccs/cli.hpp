#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccs/dot.hpp"
#include "ccs/embedding.hpp"
#include "ccs/instances.hpp"
#include "ccs/json_io.hpp"
#include "ccs/metrics.hpp"

namespace ccs::cli {

// Exit codes: 0 success, 1 domain/input errors, 2 usage errors, 3 resource
// caps. Every subcommand writes a deterministic JSON document (DOT for
// emit-dot) to stdout or --output.

namespace detail {

inline Json error_json(const std::string& kind, const std::string& message) {
    Json j;
    j["error"] = Json{{"kind", kind}, {"message", message}};
    return j;
}

struct CommonOptions {
    std::string input = "-";
    std::string output;
    std::uint64_t profile_cap = 1000000;
    int jobs = 1;
};

inline EnumLimits limits_of(const CommonOptions& common) {
    EnumLimits limits;
    limits.max_profiles = common.profile_cap;
    limits.jobs = common.jobs;
    return limits;
}

inline Json read_json(const std::string& path, std::istream& in) {
    try {
        if (path == "-") return Json::parse(in);
        std::ifstream f(path);
        if (!f) throw InputError("cannot open input file '" + path + "'");
        return Json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
}

inline void write_text(const CommonOptions& common, const std::string& text,
                       std::ostream& out) {
    if (common.output.empty()) {
        out << text;
        if (text.empty() || text.back() != '\n') out << "\n";
        return;
    }
    std::ofstream f(common.output);
    if (!f) throw InputError("cannot open output file '" + common.output + "'");
    f << text;
    if (text.empty() || text.back() != '\n') f << "\n";
}

inline void write_json(const CommonOptions& common, const Json& j, std::ostream& out) {
    write_text(common, j.dump(2), out);
}

// Rational CLI flags accept "3" or "1/10"; decimals get a pointed hint.
inline Rational flag_rational(const std::string& text, const std::string& flag) {
    try {
        return parse_rational(text);
    } catch (const InputError& e) {
        throw CLI::ValidationError(flag, e.what());
    }
}

inline Game generate_instance(const std::string& tag, int n, const Rational& eps,
                              const Rational& r, std::uint64_t seed, int max_edges,
                              const std::optional<Json>& host_doc, const EnumLimits& limits) {
    if (tag == "fig1") return build_fig1().game;
    if (tag == "fig2") return build_fig2_braess().game;
    if (tag == "fig4") return build_fig4_sp_spoa(n, eps).game;
    if (tag == "fig5") return build_fig5_unbounded_spoa(r).game;
    if (tag == "fig6") return build_fig6_sp_spos(n, eps).game;
    if (tag == "fig7") return build_fig7_unbounded_spos(r).game;
    if (tag == "fig8") return build_fig8_asymmetric(r).game;
    if (tag == "walkthrough") return build_walkthrough_ep().game;
    if (tag == "no-se") {
        if (!host_doc)
            throw InputError("gen no-se needs --input with a host game or network");
        Game host = game_from_json(*host_doc);
        return build_no_se_game(host.network(), limits);
    }
    auto random_of = [&](NetworkClass cls) {
        RandomGameSpec spec;
        spec.cls = cls;
        spec.agents = n;
        spec.max_edges = max_edges;
        spec.seed = seed;
        return random_game(spec, limits);
    };
    if (tag == "random-parallel-edges") return random_of(NetworkClass::ParallelEdges);
    if (tag == "random-parallel-paths") return random_of(NetworkClass::ParallelPaths);
    if (tag == "random-spp") return random_of(NetworkClass::Spp);
    if (tag == "random-ep") return random_of(NetworkClass::Ep);
    if (tag == "random-sp") return random_of(NetworkClass::Sp);
    if (tag == "random-general") return random_of(NetworkClass::General);
    if (tag == "random-non-spp") return random_of(NetworkClass::NonSpp);
    throw CLI::ValidationError("instance", "unknown instance tag '" + tag + "'");
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::istream& in = std::cin,
               std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"capacitated cost-sharing network games"};
    app.require_subcommand(1);

    detail::CommonOptions common;
    std::string eps_text = "1/10", r_text = "100";
    int n = 2;
    std::uint64_t seed = 1;
    int max_edges = 8;
    int max_coalition = 0;
    std::string profile_path;
    std::string instance_tag;
    bool csv = false;
    bool dot_tree = false;

    auto add_common = [&](CLI::App* cmd, bool with_input = true) {
        if (with_input)
            cmd->add_option("input", common.input, "game JSON file, or - for stdin");
        cmd->add_option("-o,--output", common.output, "write the result to a file");
        cmd->add_option("--profile-cap", common.profile_cap,
                        "enumeration budget (profiles / search nodes)");
        cmd->add_option("--jobs", common.jobs, "worker threads for enumeration");
    };

    auto* cmd_classify = app.add_subcommand("classify", "topology class flags");
    add_common(cmd_classify);
    auto* cmd_paths = app.add_subcommand("paths", "simple source-sink paths per agent");
    add_common(cmd_paths);
    auto* cmd_opt = app.add_subcommand("solve-opt", "exact social optimum");
    add_common(cmd_opt);
    auto* cmd_construct = app.add_subcommand("construct-se", "constructive strong equilibrium");
    add_common(cmd_construct);
    auto* cmd_verify = app.add_subcommand("verify", "check a profile for NE/SE");
    add_common(cmd_verify);
    cmd_verify->add_option("--profile", profile_path, "profile JSON file")->required();
    cmd_verify->add_option("--max-coalition", max_coalition,
                           "largest coalition size to try (default: all agents)");
    auto* cmd_enum = app.add_subcommand("enumerate", "exhaustive NE and SE sets");
    add_common(cmd_enum);
    auto* cmd_metrics = app.add_subcommand("metrics", "PoA/PoS/SPoA/SPoS report");
    add_common(cmd_metrics);
    cmd_metrics->add_flag("--csv", csv, "emit one CSV row instead of JSON");
    auto* cmd_gen = app.add_subcommand("gen", "emit a built-in or random instance");
    cmd_gen->add_option("instance", instance_tag,
                        "fig1|fig2|fig4|fig5|fig6|fig7|fig8|walkthrough|no-se|random-*")
        ->required();
    cmd_gen->add_option("--input", common.input, "host game for no-se emulation");
    cmd_gen->add_option("-o,--output", common.output, "write the result to a file");
    cmd_gen->add_option("--profile-cap", common.profile_cap, "enumeration budget");
    cmd_gen->add_option("--n", n, "number of agents");
    cmd_gen->add_option("--eps", eps_text, "epsilon as an exact rational");
    cmd_gen->add_option("--r", r_text, "R as an exact rational");
    cmd_gen->add_option("--seed", seed, "random seed");
    cmd_gen->add_option("--max-edges", max_edges, "edge budget for random instances");
    auto* cmd_dot = app.add_subcommand("emit-dot", "Graphviz export");
    add_common(cmd_dot);
    cmd_dot->add_flag("--tree", dot_tree, "emit the decomposition tree instead");

    try {
        app.parse(static_cast<int>(args.size() + 1), [&] {
            static std::vector<const char*> argv;
            argv.clear();
            argv.push_back("ccs");
            for (const auto& a : args) argv.push_back(a.c_str());
            return argv.data();
        }());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    EnumLimits limits = detail::limits_of(common);
    try {
        if (cmd_gen->parsed()) {
            std::optional<Json> host_doc;
            if (instance_tag == "no-se") host_doc = detail::read_json(common.input, in);
            Game game = detail::generate_instance(instance_tag, n,
                                                  detail::flag_rational(eps_text, "--eps"),
                                                  detail::flag_rational(r_text, "--r"), seed,
                                                  max_edges, host_doc, limits);
            detail::write_json(common, game_to_json(game), out);
            return 0;
        }

        Game game = game_from_json(detail::read_json(common.input, in));

        if (cmd_classify->parsed()) {
            auto d = decompose_sp(game.network(), limits);
            Json j = topology_to_json(d.is_sp() ? classify_tree(*d.tree) : TopologyClass{});
            if (!d.is_sp())
                j["obstruction"] = Json::array({d.obstruction->node_a, d.obstruction->node_b});
            j["forbidden_embedding"] = [&]() -> Json {
                auto w = find_forbidden_embedding(game.network(), limits);
                if (!w) return nullptr;
                return to_string(w->pattern);
            }();
            detail::write_json(common, j, out);
            return 0;
        }
        if (cmd_paths->parsed()) {
            Json j;
            if (game.is_symmetric()) {
                Json arr = Json::array();
                for (const auto& p : enumerate_paths(game.network(), game.network().source(),
                                                     game.network().sink(), limits))
                    arr.push_back(p.edge_ids(game.network()));
                j["paths"] = std::move(arr);
            } else {
                Json agents = Json::array();
                auto strat = agent_strategies(game, limits);
                for (int i = 0; i < game.agent_count(); ++i) {
                    auto tp = game.terminals(i);
                    Json entry;
                    entry["source"] = tp.source;
                    entry["sink"] = tp.sink;
                    Json arr = Json::array();
                    for (const auto& p : strat[static_cast<std::size_t>(i)])
                        arr.push_back(p.edge_ids(game.network()));
                    entry["paths"] = std::move(arr);
                    agents.push_back(std::move(entry));
                }
                j["agents"] = std::move(agents);
            }
            detail::write_json(common, j, out);
            return 0;
        }
        if (cmd_opt->parsed()) {
            auto optimum = solve_optimal(game, limits);
            Json j;
            j["cost"] = to_string(optimum.cost);
            j["profile"] = profile_to_json(game.network(), optimum.profile);
            detail::write_json(common, j, out);
            return 0;
        }
        if (cmd_construct->parsed()) {
            auto cls = classify(game.network(), limits);
            StrategyProfile profile;
            std::string method;
            bool single_source = true;
            for (int i = 1; i < game.agent_count(); ++i)
                if (game.terminals(i).source != game.terminals(0).source) single_source = false;
            if (game.is_symmetric() && cls.is_parallel_edges) {
                profile = construct_se_parallel_edges(game).profile;
                method = "parallel_edges";
            } else if (game.is_symmetric() && cls.is_spp) {
                profile = construct_se_spp(game, limits);
                method = "spp";
            } else if (!game.is_symmetric() && cls.is_spp && single_source) {
                profile = construct_se_single_source(game, limits);
                method = "single_source";
            } else if (!game.is_symmetric() && cls.is_spp) {
                profile = construct_se_multi_source(game, limits);
                method = "multi_source";
            } else {
                throw DomainError(
                    "no constructive strong equilibrium for this topology/agent pattern");
            }
            Json j;
            j["method"] = method;
            j["profile"] = profile_to_json(game.network(), profile);
            Json costs = Json::array();
            for (int i = 0; i < game.agent_count(); ++i)
                costs.push_back(agent_cost(game, profile, i).str());
            j["agent_costs"] = std::move(costs);
            j["social_cost"] = social_cost(game, profile).str();
            detail::write_json(common, j, out);
            return 0;
        }
        if (cmd_verify->parsed()) {
            std::ifstream pf(profile_path);
            if (!pf) throw InputError("cannot open profile file '" + profile_path + "'");
            auto profile = profile_from_json(game, detail::read_json(profile_path, pf));
            Json j;
            if (!is_feasible(game, profile)) {
                j["feasible"] = false;
                j["ok"] = false;
                detail::write_json(common, j, out);
                return 1;
            }
            auto witness = verify_se(game, profile, max_coalition, limits);
            j["feasible"] = true;
            j["ok"] = !witness.has_value();
            if (witness) j["witness"] = witness_to_json(game.network(), *witness);
            detail::write_json(common, j, out);
            return 0;
        }
        if (cmd_enum->parsed()) {
            auto sets = enumerate_equilibria(game, limits);
            detail::write_json(common, equilibria_to_json(game, sets), out);
            return 0;
        }
        if (cmd_metrics->parsed()) {
            auto report = compute_metrics(game, limits);
            if (csv)
                detail::write_text(common,
                                   metrics_csv_header() + "\n" + metrics_to_csv(game, report),
                                   out);
            else
                detail::write_json(common, metrics_to_json(game, report), out);
            return 0;
        }
        if (cmd_dot->parsed()) {
            if (dot_tree) {
                auto d = decompose_sp(game.network(), limits);
                if (!d.is_sp()) throw DomainError("network is not series-parallel");
                detail::write_text(common, tree_to_dot(*d.tree), out);
            } else {
                detail::write_text(common, network_to_dot(game.network()), out);
            }
            return 0;
        }
        err << "no subcommand\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        detail::write_json(common, detail::error_json("resource", e.what()), out);
        return 3;
    } catch (const InputError& e) {
        detail::write_json(common, detail::error_json("input", e.what()), out);
        return 1;
    } catch (const DomainError& e) {
        detail::write_json(common, detail::error_json("domain", e.what()), out);
        return 1;
    }
}

}  // namespace ccs::cli
