#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ccs/equilibria.hpp"
#include "ccs/game.hpp"
#include "ccs/metrics.hpp"
#include "ccs/optimal.hpp"
#include "ccs/topology.hpp"

namespace ccs {

using Json = nlohmann::ordered_json;

// Game files look like:
//   { "directed": true,
//     "nodes": ["s","v","t"],
//     "edges": [{"id":"a","from":"s","to":"t","cost":"1","capacity":1}, ...],
//     "source": "s", "sink": "t",
//     "agents": {"symmetric": {"n": 2}} | {"list": [{"source":..,"sink":..}, ...]} }
// Costs are integers or "p/q" strings; decimal literals are rejected.

inline Rational cost_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number())
        throw InputError("decimal cost rejected; write an exact fraction like \"7/10\"");
    throw InputError("cost must be an integer or a \"p/q\" string");
}

inline Game game_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("game document must be a JSON object");
    for (const auto& field : {"directed", "nodes", "edges", "source", "sink", "agents"})
        if (!j.contains(field))
            throw InputError(std::string("game document missing field '") + field + "'");

    std::vector<NodeId> nodes;
    for (const auto& v : j.at("nodes")) nodes.push_back(v.get<std::string>());
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        int capacity = e.at("capacity").get<int>();
        edges.push_back({e.at("id").get<std::string>(), e.at("from").get<std::string>(),
                         e.at("to").get<std::string>(), cost_from_json(e.at("cost")),
                         capacity});
    }
    Network net(std::move(nodes), std::move(edges), j.at("directed").get<bool>(),
                j.at("source").get<std::string>(), j.at("sink").get<std::string>());

    const Json& agents = j.at("agents");
    if (agents.contains("symmetric"))
        return Game::symmetric(std::move(net), agents.at("symmetric").at("n").get<int>());
    if (agents.contains("list")) {
        std::vector<TerminalPair> pairs;
        for (const auto& p : agents.at("list"))
            pairs.push_back({p.at("source").get<std::string>(), p.at("sink").get<std::string>()});
        return Game::asymmetric(std::move(net), std::move(pairs));
    }
    throw InputError("agents must contain either \"symmetric\" or \"list\"");
}

inline Json game_to_json(const Game& game) {
    const Network& net = game.network();
    Json j;
    j["directed"] = net.directed();
    j["nodes"] = net.nodes();
    Json edges = Json::array();
    for (const auto& e : net.edges()) {
        Json je;
        je["id"] = e.id;
        je["from"] = e.from;
        je["to"] = e.to;
        je["cost"] = to_string(e.cost);
        je["capacity"] = e.capacity;
        edges.push_back(std::move(je));
    }
    j["edges"] = std::move(edges);
    j["source"] = net.source();
    j["sink"] = net.sink();
    if (game.is_symmetric()) {
        j["agents"] = Json{{"symmetric", Json{{"n", game.agent_count()}}}};
    } else {
        Json list = Json::array();
        for (int i = 0; i < game.agent_count(); ++i) {
            auto tp = game.terminals(i);
            list.push_back(Json{{"source", tp.source}, {"sink", tp.sink}});
        }
        j["agents"] = Json{{"list", std::move(list)}};
    }
    return j;
}

inline Json profile_to_json(const Network& net, const StrategyProfile& profile) {
    Json out = Json::array();
    for (const auto& p : profile.paths) out.push_back(p.edge_ids(net));
    return out;
}

// Reconstructs traversal directions by walking the edge ids from the
// agent's source; multigraphs are unambiguous because the walk pins the
// current node.
inline Path path_from_edge_ids(const Network& net, const NodeId& from, const NodeId& to,
                               const std::vector<EdgeId>& ids) {
    Path path;
    NodeId at = from;
    for (const auto& id : ids) {
        int e = net.edge_index(id);
        const Edge& ed = net.edge(e);
        if (ed.from == at) {
            path.steps.push_back({e, true});
            at = ed.to;
        } else if (!net.directed() && ed.to == at) {
            path.steps.push_back({e, false});
            at = ed.from;
        } else {
            throw InputError("edge '" + id + "' does not continue the path at node '" + at +
                             "'");
        }
    }
    if (at != to) throw InputError("path does not end at the agent's sink");
    std::set<NodeId> seen{from};
    at = from;
    for (const auto& s : path.steps) {
        const Edge& ed = net.edge(s.edge);
        at = s.forward ? ed.to : ed.from;
        if (!seen.insert(at).second) throw InputError("path repeats node '" + at + "'");
    }
    return path;
}

inline StrategyProfile profile_from_json(const Game& game, const Json& j) {
    const Json& lists = j.is_object() && j.contains("profile") ? j.at("profile") : j;
    if (!lists.is_array() || static_cast<int>(lists.size()) != game.agent_count())
        throw InputError("profile must list one edge-id path per agent");
    StrategyProfile profile;
    for (int i = 0; i < game.agent_count(); ++i) {
        auto tp = game.terminals(i);
        std::vector<EdgeId> ids;
        for (const auto& v : lists.at(static_cast<std::size_t>(i)))
            ids.push_back(v.get<std::string>());
        profile.paths.push_back(path_from_edge_ids(game.network(), tp.source, tp.sink, ids));
    }
    return profile;
}

inline Json witness_to_json(const Network& net, const DeviationWitness& w) {
    Json j;
    j["coalition"] = w.coalition;
    Json strategies = Json::array();
    for (const auto& p : w.new_strategies) strategies.push_back(p.edge_ids(net));
    j["strategies"] = std::move(strategies);
    Json old_costs = Json::array(), new_costs = Json::array();
    for (const auto& c : w.old_costs) old_costs.push_back(c.str());
    for (const auto& c : w.new_costs) new_costs.push_back(c.str());
    j["old_costs"] = std::move(old_costs);
    j["new_costs"] = std::move(new_costs);
    return j;
}

inline Json equilibria_to_json(const Game& game, const EquilibriumSets& sets) {
    Json j;
    Json ne = Json::array(), se = Json::array();
    for (const auto& p : sets.nash) {
        Json entry;
        entry["profile"] = profile_to_json(game.network(), p);
        entry["social_cost"] = social_cost(game, p).str();
        ne.push_back(std::move(entry));
    }
    for (const auto& p : sets.strong) {
        Json entry;
        entry["profile"] = profile_to_json(game.network(), p);
        entry["social_cost"] = social_cost(game, p).str();
        se.push_back(std::move(entry));
    }
    j["ne"] = std::move(ne);
    j["se"] = std::move(se);
    j["stats"] = Json{{"profiles_scanned", sets.stats.profiles_scanned},
                      {"feasible_profiles", sets.stats.feasible_profiles}};
    return j;
}

inline Json topology_to_json(const TopologyClass& cls) {
    Json j;
    j["sp"] = cls.is_sp;
    j["ep"] = cls.is_ep;
    j["spp"] = cls.is_spp;
    j["parallel_paths"] = cls.is_parallel_paths;
    j["parallel_edges"] = cls.is_parallel_edges;
    return j;
}

inline Json metrics_to_json(const Game& game, const MetricsReport& report) {
    Json j;
    j["opt_cost"] = to_string(report.opt_cost);
    j["opt_profile"] = profile_to_json(game.network(), report.opt_profile);
    j["poa"] = report.poa.str();
    j["pos"] = report.pos.str();
    j["spoa"] = report.spoa.str();
    j["spos"] = report.spos.str();
    Json witnesses;
    auto put = [&](const char* name, const std::optional<StrategyProfile>& p) {
        if (p) witnesses[name] = profile_to_json(game.network(), *p);
    };
    put("worst_ne", report.worst_ne);
    put("best_ne", report.best_ne);
    put("worst_se", report.worst_se);
    put("best_se", report.best_se);
    j["witnesses"] = std::move(witnesses);
    j["topology"] = topology_to_json(report.topology);
    j["homogeneous_capacities"] = report.homogeneous_capacities;
    Json bounds = Json::array();
    for (const auto& b : report.bounds) {
        Json jb;
        jb["name"] = b.name;
        jb["applicable"] = b.applicable;
        if (b.applicable) {
            jb["pass"] = b.pass;
            jb["detail"] = b.detail;
        }
        bounds.push_back(std::move(jb));
    }
    j["bounds"] = std::move(bounds);
    j["stats"] = Json{{"profiles_scanned", report.stats.profiles_scanned},
                      {"feasible_profiles", report.stats.feasible_profiles}};
    return j;
}

// One CSV row per game for batch sweeps.
inline std::string metrics_csv_header() {
    return "opt_cost,poa,pos,spoa,spos,sp,ep,spp,n";
}

inline std::string metrics_to_csv(const Game& game, const MetricsReport& r) {
    std::string row = to_string(r.opt_cost);
    for (const auto* v : {&r.poa, &r.pos, &r.spoa, &r.spos}) row += "," + v->str();
    auto flag = [](bool b) { return b ? "1" : "0"; };
    row += std::string(",") + flag(r.topology.is_sp) + "," + flag(r.topology.is_ep) + "," +
           flag(r.topology.is_spp) + "," + std::to_string(game.agent_count());
    return row;
}

}  // namespace ccs
