#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccs/rational.hpp"

namespace ccs {

using NodeId = std::string;
using EdgeId = std::string;

struct Edge {
    EdgeId id;
    NodeId from;
    NodeId to;
    Rational cost;   // p_e >= 0
    int capacity;    // c_e >= 0; capacity 0 means the edge can never carry an agent
};

// A two-terminal multigraph. Parallel edges are legal and distinguished by id.
// Undirected networks keep the same edge list; traversal direction is a
// property of a path step, not of the edge.
class Network {
public:
    Network() = default;
    Network(std::vector<NodeId> nodes, std::vector<Edge> edges, bool directed,
            NodeId source, NodeId sink)
        : nodes_(std::move(nodes)),
          edges_(std::move(edges)),
          directed_(directed),
          source_(std::move(source)),
          sink_(std::move(sink)) {
        validate();
    }

    const std::vector<NodeId>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool directed() const { return directed_; }
    const NodeId& source() const { return source_; }
    const NodeId& sink() const { return sink_; }

    bool has_node(const NodeId& v) const { return node_index_.count(v) > 0; }
    int edge_index(const EdgeId& id) const {
        auto it = edge_index_.find(id);
        if (it == edge_index_.end()) throw InputError("unknown edge id '" + id + "'");
        return it->second;
    }
    const Edge& edge(int idx) const { return edges_.at(static_cast<std::size_t>(idx)); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

private:
    void validate() {
        if (source_ == sink_) throw InputError("source and sink must differ");
        for (const auto& v : nodes_) {
            if (!node_index_.emplace(v, static_cast<int>(node_index_.size())).second)
                throw InputError("duplicate node id '" + v + "'");
        }
        if (!has_node(source_)) throw InputError("unknown source node '" + source_ + "'");
        if (!has_node(sink_)) throw InputError("unknown sink node '" + sink_ + "'");
        for (const auto& e : edges_) {
            if (!edge_index_.emplace(e.id, static_cast<int>(edge_index_.size())).second)
                throw InputError("duplicate edge id '" + e.id + "'");
            if (!has_node(e.from)) throw InputError("edge '" + e.id + "' references unknown node '" + e.from + "'");
            if (!has_node(e.to)) throw InputError("edge '" + e.id + "' references unknown node '" + e.to + "'");
            if (e.from == e.to) throw InputError("edge '" + e.id + "' is a self loop");
            if (e.cost < 0) throw InputError("edge '" + e.id + "' has negative cost");
            if (e.capacity < 0) throw InputError("edge '" + e.id + "' has negative capacity");
        }
    }

    std::vector<NodeId> nodes_;
    std::vector<Edge> edges_;
    bool directed_ = true;
    NodeId source_;
    NodeId sink_;
    std::map<NodeId, int> node_index_;
    std::map<EdgeId, int> edge_index_;
};

// One traversal step: an edge index plus the direction it is walked in.
// Directed networks always walk forward.
struct PathStep {
    int edge;
    bool forward;

    friend bool operator==(const PathStep& a, const PathStep& b) {
        return a.edge == b.edge && a.forward == b.forward;
    }
};

// A simple walk between an agent's terminals. Node simplicity is enforced
// by the enumeration and parsing entry points, not re-checked per use.
struct Path {
    std::vector<PathStep> steps;

    bool contains_edge(int edge) const {
        for (const auto& s : steps)
            if (s.edge == edge) return true;
        return false;
    }

    std::vector<EdgeId> edge_ids(const Network& net) const {
        std::vector<EdgeId> out;
        out.reserve(steps.size());
        for (const auto& s : steps) out.push_back(net.edge(s.edge).id);
        return out;
    }

    // Lexicographic key over edge ids; the canonical path order everywhere.
    std::string key(const Network& net) const {
        std::string k;
        for (const auto& s : steps) {
            k += net.edge(s.edge).id;
            k += '\x1f';
        }
        return k;
    }

    friend bool operator==(const Path& a, const Path& b) { return a.steps == b.steps; }
};

struct TerminalPair {
    NodeId source;
    NodeId sink;
};

// A CCS connection game: a network plus its agent roster. Symmetric games
// share the network terminals; asymmetric games carry per-agent pairs.
class Game {
public:
    static Game symmetric(Network net, int agent_count) {
        if (agent_count < 1) throw InputError("a game needs at least one agent");
        Game g;
        g.net_ = std::move(net);
        g.n_ = agent_count;
        return g;
    }

    static Game asymmetric(Network net, std::vector<TerminalPair> terminals) {
        if (terminals.empty()) throw InputError("a game needs at least one agent");
        Game g;
        g.net_ = std::move(net);
        g.n_ = static_cast<int>(terminals.size());
        for (const auto& tp : terminals) {
            if (!g.net_.has_node(tp.source))
                throw InputError("agent source '" + tp.source + "' is not a node");
            if (!g.net_.has_node(tp.sink))
                throw InputError("agent sink '" + tp.sink + "' is not a node");
            if (tp.source == tp.sink)
                throw InputError("agent source and sink must differ");
        }
        g.terminals_ = std::move(terminals);
        return g;
    }

    const Network& network() const { return net_; }
    int agent_count() const { return n_; }
    bool is_symmetric() const { return terminals_.empty(); }

    TerminalPair terminals(int agent) const {
        if (agent < 0 || agent >= n_) throw InputError("agent index out of range");
        if (is_symmetric()) return {net_.source(), net_.sink()};
        return terminals_[static_cast<std::size_t>(agent)];
    }

private:
    Game() = default;
    Network net_;
    int n_ = 0;
    std::vector<TerminalPair> terminals_;
};

// Assignment agent index -> path. Profiles over k < n agents appear only as
// the PartialProfile type in the optimal-profile machinery.
struct StrategyProfile {
    std::vector<Path> paths;

    int agent_count() const { return static_cast<int>(paths.size()); }

    // x_e(s): number of agents whose path contains edge e.
    std::vector<int> usage(const Network& net) const {
        std::vector<int> x(static_cast<std::size_t>(net.edge_count()), 0);
        for (const auto& p : paths)
            for (const auto& s : p.steps) ++x[static_cast<std::size_t>(s.edge)];
        return x;
    }
};

struct EnumLimits {
    std::uint64_t max_paths = 100000;
    std::uint64_t max_profiles = 1000000;
    int jobs = 1;
};

namespace detail {

struct Adjacency {
    // steps[v] = outgoing traversal steps from v, sorted by edge id so DFS
    // yields paths in lexicographic edge-id order.
    std::vector<std::vector<std::pair<int, bool>>> adj;
    std::map<NodeId, int> index;

    explicit Adjacency(const Network& net) {
        for (const auto& v : net.nodes()) index.emplace(v, static_cast<int>(index.size()));
        adj.resize(net.nodes().size());
        std::vector<int> order(static_cast<std::size_t>(net.edge_count()));
        for (int i = 0; i < net.edge_count(); ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return net.edge(a).id < net.edge(b).id;
        });
        for (int idx : order) {
            const Edge& e = net.edge(idx);
            adj[static_cast<std::size_t>(index.at(e.from))].push_back({idx, true});
            if (!net.directed())
                adj[static_cast<std::size_t>(index.at(e.to))].push_back({idx, false});
        }
    }
};

}  // namespace detail

// All simple source->sink paths in canonical (lexicographic edge-id) order.
// Capacity-0 edges are enumerated too: feasibility is a profile property.
inline std::vector<Path> enumerate_paths(const Network& net, const NodeId& source,
                                         const NodeId& sink, const EnumLimits& limits = {}) {
    if (!net.has_node(source)) throw InputError("unknown node id '" + source + "'");
    if (!net.has_node(sink)) throw InputError("unknown node id '" + sink + "'");
    detail::Adjacency a(net);
    std::vector<Path> out;
    std::vector<PathStep> stack;
    std::vector<char> visited(net.nodes().size(), 0);
    int target = a.index.at(sink);

    auto dfs = [&](auto&& self, int v) -> void {
        if (v == target) {
            out.push_back(Path{stack});
            if (out.size() > limits.max_paths)
                throw ResourceError("path enumeration exceeded cap of " +
                                    std::to_string(limits.max_paths));
            return;
        }
        visited[static_cast<std::size_t>(v)] = 1;
        for (const auto& [edge, fwd] : a.adj[static_cast<std::size_t>(v)]) {
            const Edge& e = net.edge(edge);
            int next = a.index.at(fwd ? e.to : e.from);
            if (visited[static_cast<std::size_t>(next)]) continue;
            stack.push_back({edge, fwd});
            self(self, next);
            stack.pop_back();
        }
        visited[static_cast<std::size_t>(v)] = 0;
    };
    dfs(dfs, a.index.at(source));
    return out;
}

inline bool is_feasible(const Game& game, const StrategyProfile& profile) {
    auto x = profile.usage(game.network());
    for (int e = 0; e < game.network().edge_count(); ++e)
        if (x[static_cast<std::size_t>(e)] > game.network().edge(e).capacity) return false;
    return true;
}

// p_i(s) = sum over edges of agent i's path of p_e / x_e(s), or infinity
// when the profile violates some capacity.
inline ExtCost agent_cost(const Game& game, const StrategyProfile& profile, int agent) {
    if (agent < 0 || agent >= profile.agent_count())
        throw InputError("agent index out of range");
    if (!is_feasible(game, profile)) return ExtCost::infinity();
    auto x = profile.usage(game.network());
    Rational total = 0;
    for (const auto& s : profile.paths[static_cast<std::size_t>(agent)].steps) {
        const Edge& e = game.network().edge(s.edge);
        total += e.cost / x[static_cast<std::size_t>(s.edge)];
    }
    return total;
}

// Fair sharing telescopes: the sum of agent costs equals the sum of used-edge
// costs. Both routes are computed and compared so drift cannot hide.
inline ExtCost social_cost(const Game& game, const StrategyProfile& profile) {
    if (!is_feasible(game, profile)) return ExtCost::infinity();
    auto x = profile.usage(game.network());
    Rational used = 0;
    for (int e = 0; e < game.network().edge_count(); ++e)
        if (x[static_cast<std::size_t>(e)] >= 1) used += game.network().edge(e).cost;
    Rational by_agents = 0;
    for (int i = 0; i < profile.agent_count(); ++i) by_agents += agent_cost(game, profile, i).value();
    if (used != by_agents)
        throw DomainError("social cost identity violated (sharing accounting bug)");
    return used;
}

// Phi(s) = sum_e p_e * H_{x_e(s)}, the exact potential of the game.
inline Rational potential(const Game& game, const StrategyProfile& profile) {
    if (!is_feasible(game, profile))
        throw DomainError("potential is defined for feasible profiles only");
    auto x = profile.usage(game.network());
    Rational phi = 0;
    for (int e = 0; e < game.network().edge_count(); ++e)
        if (x[static_cast<std::size_t>(e)] > 0)
            phi += game.network().edge(e).cost * harmonic(x[static_cast<std::size_t>(e)]);
    return phi;
}

}  // namespace ccs
