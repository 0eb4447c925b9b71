#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccs/equilibria.hpp"
#include "ccs/game.hpp"
#include "ccs/topology.hpp"

namespace ccs {

struct Optimum {
    StrategyProfile profile;
    Rational cost;
};

// A profile over a subset of the agents; the rest are unassigned.
struct PartialProfile {
    std::map<int, Path> assigned;
};

namespace detail {

// Integral max flow on the edges enabled in `mask`. Undirected edges are
// modeled as an arc pair, one per direction, each with full capacity;
// opposite flows cancel during decomposition.
class FlowSolver {
public:
    FlowSolver(const Network& net, std::uint64_t mask) : net_(net) {
        for (const auto& v : net.nodes()) index_.emplace(v, static_cast<int>(index_.size()));
        adj_.resize(net.nodes().size());
        for (int e = 0; e < net.edge_count(); ++e) {
            if (!(mask >> e & 1)) continue;
            const Edge& ed = net.edge(e);
            add_arc(index_.at(ed.from), index_.at(ed.to), ed.capacity, e, true);
            if (!net.directed())
                add_arc(index_.at(ed.to), index_.at(ed.from), ed.capacity, e, false);
        }
    }

    int max_flow(int amount) {
        int s = index_.at(net_.source());
        int t = index_.at(net_.sink());
        int sent = 0;
        while (sent < amount) {
            std::vector<int> parent_arc(adj_.size(), -1);
            std::vector<int> queue{s};
            std::vector<char> seen(adj_.size(), 0);
            seen[static_cast<std::size_t>(s)] = 1;
            for (std::size_t qi = 0; qi < queue.size(); ++qi) {
                int v = queue[qi];
                for (int a : adj_[static_cast<std::size_t>(v)]) {
                    const Arc& arc = arcs_[static_cast<std::size_t>(a)];
                    if (arc.capacity - arc.flow <= 0) continue;
                    if (seen[static_cast<std::size_t>(arc.to)]) continue;
                    seen[static_cast<std::size_t>(arc.to)] = 1;
                    parent_arc[static_cast<std::size_t>(arc.to)] = a;
                    queue.push_back(arc.to);
                }
            }
            if (!seen[static_cast<std::size_t>(t)]) break;
            for (int v = t; v != s;) {
                Arc& arc = arcs_[static_cast<std::size_t>(parent_arc[static_cast<std::size_t>(v)])];
                arc.flow += 1;
                arcs_[static_cast<std::size_t>(arc.twin)].flow -= 1;
                v = arc.from;
            }
            ++sent;
        }
        return sent;
    }

    // Net usage per edge after cancelling antiparallel flow; pair of
    // (forward units, backward units), one side always zero.
    std::vector<std::pair<int, int>> edge_usage() const {
        std::vector<std::pair<int, int>> use(static_cast<std::size_t>(net_.edge_count()), {0, 0});
        for (const auto& arc : arcs_) {
            if (arc.edge < 0 || arc.flow <= 0) continue;
            (arc.forward ? use[static_cast<std::size_t>(arc.edge)].first
                         : use[static_cast<std::size_t>(arc.edge)].second) += arc.flow;
        }
        for (auto& [f, b] : use) {
            int cancel = std::min(f, b);
            f -= cancel;
            b -= cancel;
        }
        return use;
    }

private:
    struct Arc {
        int from, to;
        int capacity;
        int flow = 0;
        int twin;
        int edge;      // originating network edge, -1 for residual twins
        bool forward;  // direction relative to the network edge
    };

    void add_arc(int from, int to, int capacity, int edge, bool forward) {
        Arc fwd{from, to, capacity, 0, static_cast<int>(arcs_.size()) + 1, edge, forward};
        Arc rev{to, from, 0, 0, static_cast<int>(arcs_.size()), -1, forward};
        adj_[static_cast<std::size_t>(from)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back(fwd);
        adj_[static_cast<std::size_t>(to)].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back(rev);
    }

    const Network& net_;
    std::map<NodeId, int> index_;
    std::vector<std::vector<int>> adj_;
    std::vector<Arc> arcs_;
};

// Decompose a cancelled integral flow into `amount` simple paths, smallest
// edge id first at every branch.
inline std::vector<Path> decompose_flow(const Network& net,
                                        std::vector<std::pair<int, int>> usage, int amount) {
    std::vector<Path> out;
    std::map<NodeId, std::vector<std::pair<int, bool>>> outgoing;
    std::vector<int> order(static_cast<std::size_t>(net.edge_count()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return net.edge(a).id < net.edge(b).id; });
    for (int k = 0; k < amount; ++k) {
        Path p;
        NodeId at = net.source();
        while (at != net.sink()) {
            bool moved = false;
            for (int e : order) {
                auto& [fwd, bwd] = usage[static_cast<std::size_t>(e)];
                const Edge& ed = net.edge(e);
                if (fwd > 0 && ed.from == at) {
                    --fwd;
                    p.steps.push_back({e, true});
                    at = ed.to;
                    moved = true;
                    break;
                }
                if (bwd > 0 && ed.to == at) {
                    --bwd;
                    p.steps.push_back({e, false});
                    at = ed.from;
                    moved = true;
                    break;
                }
            }
            if (!moved) throw DomainError("flow decomposition stalled (internal error)");
        }
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(),
              [&](const Path& a, const Path& b) { return a.key(net) < b.key(net); });
    return out;
}

struct AssignmentOracle {
    const Game& game;
    const std::vector<std::vector<Path>>& strategies;
    std::vector<std::uint64_t> path_masks(int agent) const {
        std::vector<std::uint64_t> masks;
        for (const auto& p : strategies[static_cast<std::size_t>(agent)]) {
            std::uint64_t m = 0;
            for (const auto& s : p.steps) m |= std::uint64_t{1} << s.edge;
            masks.push_back(m);
        }
        return masks;
    }
};

// Backtracking feasibility for asymmetric games: can every agent be routed
// inside the enabled edge set without violating capacities?
inline std::optional<std::vector<int>> route_all_agents(
    const Game& game, const std::vector<std::vector<Path>>& strategies, std::uint64_t mask) {
    const Network& net = game.network();
    std::vector<int> usage(static_cast<std::size_t>(net.edge_count()), 0);
    std::vector<int> choice(static_cast<std::size_t>(game.agent_count()), -1);
    auto rec = [&](auto&& self, int agent) -> bool {
        if (agent == game.agent_count()) return true;
        const auto& options = strategies[static_cast<std::size_t>(agent)];
        for (std::size_t o = 0; o < options.size(); ++o) {
            bool ok = true;
            for (const auto& s : options[o].steps) {
                if (!(mask >> s.edge & 1) ||
                    usage[static_cast<std::size_t>(s.edge)] + 1 >
                        net.edge(s.edge).capacity) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            for (const auto& s : options[o].steps) ++usage[static_cast<std::size_t>(s.edge)];
            choice[static_cast<std::size_t>(agent)] = static_cast<int>(o);
            if (self(self, agent + 1)) return true;
            for (const auto& s : options[o].steps) --usage[static_cast<std::size_t>(s.edge)];
        }
        return false;
    };
    if (!rec(rec, 0)) return std::nullopt;
    return choice;
}

}  // namespace detail

// Exact social optimum. Social cost depends only on the set of used edges,
// so the search branches on edge subsets in lexicographic id order and asks
// whether the subgraph can route all agents within capacities (max flow for
// symmetric games, backtracking assignment otherwise). Among equal-cost
// subsets the first whose canonical routing uses every enabled edge wins,
// which pins the reported witness profile.
inline Optimum solve_optimal(const Game& game, const EnumLimits& limits = {}) {
    const Network& net = game.network();
    if (net.edge_count() > 62)
        throw ResourceError("optimal search supports at most 62 edges");
    auto strategies = agent_strategies(game, limits);

    std::vector<int> order(static_cast<std::size_t>(net.edge_count()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return net.edge(a).id < net.edge(b).id; });

    auto routable = [&](std::uint64_t mask) -> bool {
        if (game.is_symmetric()) {
            detail::FlowSolver flow(net, mask);
            return flow.max_flow(game.agent_count()) == game.agent_count();
        }
        return detail::route_all_agents(game, strategies, mask).has_value();
    };

    std::uint64_t full = net.edge_count() == 62
                             ? ~std::uint64_t{0} >> 2
                             : (std::uint64_t{1} << net.edge_count()) - 1;
    if (!routable(full))
        throw DomainError("infeasible game: no profile satisfies the capacities");

    std::uint64_t nodes_visited = 0;
    auto budget = [&]() {
        if (++nodes_visited > limits.max_profiles)
            throw ResourceError("optimal search exceeded cap of " +
                                std::to_string(limits.max_profiles));
    };

    // Pass 1: the minimum cost.
    std::optional<Rational> best;
    {
        auto rec = [&](auto&& self, std::size_t next, std::uint64_t mask,
                       const Rational& cost) -> void {
            budget();
            if (best && cost > *best) return;
            if ((!best || cost < *best) && routable(mask)) best = cost;
            for (std::size_t i = next; i < order.size(); ++i) {
                int e = order[i];
                Rational c2 = cost + net.edge(e).cost;
                if (best && c2 > *best) continue;
                self(self, i + 1, mask | std::uint64_t{1} << e, c2);
            }
        };
        rec(rec, 0, 0, Rational(0));
    }

    // Pass 2: the first minimal subset (in sorted-id order) that the
    // canonical routing saturates edge-for-edge.
    std::optional<Optimum> result;
    {
        auto emit = [&](std::uint64_t mask) -> bool {
            if (!routable(mask)) return false;
            StrategyProfile profile;
            if (game.is_symmetric()) {
                detail::FlowSolver flow(net, mask);
                flow.max_flow(game.agent_count());
                auto paths =
                    detail::decompose_flow(net, flow.edge_usage(), game.agent_count());
                profile.paths = std::move(paths);
            } else {
                auto choice = detail::route_all_agents(game, strategies, mask);
                for (int i = 0; i < game.agent_count(); ++i)
                    profile.paths.push_back(
                        strategies[static_cast<std::size_t>(i)]
                                  [static_cast<std::size_t>((*choice)[static_cast<std::size_t>(i)])]);
            }
            std::uint64_t used = 0;
            for (const auto& p : profile.paths)
                for (const auto& s : p.steps) used |= std::uint64_t{1} << s.edge;
            if (used != mask) return false;
            result = Optimum{std::move(profile), *best};
            return true;
        };
        auto rec = [&](auto&& self, std::size_t next, std::uint64_t mask,
                       const Rational& cost) -> bool {
            budget();
            if (cost > *best) return false;
            if (cost == *best && emit(mask)) return true;
            for (std::size_t i = next; i < order.size(); ++i) {
                int e = order[i];
                if (self(self, i + 1, mask | std::uint64_t{1} << e, cost + net.edge(e).cost))
                    return true;
            }
            return false;
        };
        rec(rec, 0, 0, Rational(0));
    }
    if (!result) throw DomainError("optimal search failed to recover a witness");
    return std::move(*result);
}

// The subnetwork spanned by an edge subset; terminals are kept.
inline Network subnetwork(const Network& net, const std::set<EdgeId>& edge_ids) {
    std::set<NodeId> keep{net.source(), net.sink()};
    std::vector<Edge> edges;
    for (const auto& e : net.edges()) {
        if (!edge_ids.count(e.id)) continue;
        keep.insert(e.from);
        keep.insert(e.to);
        edges.push_back(e);
    }
    std::vector<NodeId> nodes;
    for (const auto& v : net.nodes())
        if (keep.count(v)) nodes.push_back(v);
    return Network(std::move(nodes), std::move(edges), net.directed(), net.source(),
                   net.sink());
}

inline std::set<EdgeId> used_edge_ids(const Network& net, const StrategyProfile& profile) {
    std::set<EdgeId> out;
    for (const auto& p : profile.paths)
        for (const auto& s : p.steps) out.insert(net.edge(s.edge).id);
    return out;
}

namespace detail {

// Recursive structure probe for the extension-parallel walk of the
// optimal-profile chooser.
struct EpView {
    const Network& net;
    std::set<int> edges;  // edge indices of the current subnetwork
    NodeId entry;
    NodeId exit;
};

inline std::vector<std::set<int>> parallel_components(const EpView& view) {
    // Union-find over edges; edges sharing an interior node merge.
    std::map<NodeId, std::vector<int>> by_node;
    for (int e : view.edges) {
        const Edge& ed = view.net.edge(e);
        if (ed.from != view.entry && ed.from != view.exit) by_node[ed.from].push_back(e);
        if (ed.to != view.entry && ed.to != view.exit) by_node[ed.to].push_back(e);
    }
    std::map<int, int> parent;
    for (int e : view.edges) parent[e] = e;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [node, group] : by_node)
        for (std::size_t i = 1; i < group.size(); ++i)
            parent[find(group[0])] = find(group[i]);
    std::map<int, std::set<int>> comps;
    for (int e : view.edges) comps[find(e)].insert(e);
    std::vector<std::set<int>> out;
    for (auto& [root, members] : comps) out.push_back(std::move(members));
    // Canonical order by smallest edge id.
    std::sort(out.begin(), out.end(), [&](const std::set<int>& a, const std::set<int>& b) {
        return view.net.edge(*a.begin()).id < view.net.edge(*b.begin()).id;
    });
    return out;
}

inline Network view_subnetwork(const EpView& view) {
    std::set<EdgeId> ids;
    for (int e : view.edges) ids.insert(view.net.edge(e).id);
    std::set<NodeId> keep{view.entry, view.exit};
    std::vector<Edge> edges;
    for (const auto& e : view.net.edges())
        if (ids.count(e.id)) {
            keep.insert(e.from);
            keep.insert(e.to);
            edges.push_back(e);
        }
    std::vector<NodeId> nodes;
    for (const auto& v : view.net.nodes())
        if (keep.count(v)) nodes.push_back(v);
    return Network(std::move(nodes), std::move(edges), view.net.directed(), view.entry,
                   view.exit);
}

// Split a series view at its junction nodes; segment i holds the edges
// lying between junction i and junction i+1. Edge indices are relative to
// the enclosing network of the view.
struct ViewChain {
    std::vector<NodeId> junctions;
    std::vector<std::set<int>> segments;
};

inline ViewChain view_chain(const EpView& view, const EnumLimits& limits) {
    Network sub = view_subnetwork(view);
    auto chain = spp_chain(sub, limits);
    ViewChain out;
    out.junctions = chain.junctions;
    out.segments.resize(chain.blocks.size());
    for (std::size_t b = 0; b < chain.blocks.size(); ++b)
        for (const auto& p : chain.blocks[b].paths)
            for (const auto& s : p)
                out.segments[b].insert(view.net.edge_index(sub.edge(s.edge).id));
    return out;
}

}  // namespace detail

// ChooseOptimalProfile: walk the extension-parallel structure of the
// optimum-used subnetwork and copy the strong equilibrium's usage onto it.
// Single edge: the agents using it in the equilibrium keep it. Parallel:
// split the agent set by which side they touch and recurse. Extension edge:
// recurse on the core, then agents using the extension edge but missing a
// core path get the first available one; the rest stay unassigned.
class OptimalProfileChooser {
public:
    OptimalProfileChooser(const Game& game, const StrategyProfile& se_profile,
                          const EnumLimits& limits)
        : game_(game), se_(se_profile), limits_(limits) {
        usage_.assign(static_cast<std::size_t>(game.network().edge_count()), 0);
    }

    PartialProfile choose(const Network& g_opt, const std::vector<int>& agents) {
        detail::EpView view{game_.network(), {}, g_opt.source(), g_opt.sink()};
        for (const auto& e : g_opt.edges()) view.edges.insert(game_.network().edge_index(e.id));
        std::map<int, std::vector<PathStep>> built;
        recurse(view, agents, built);
        PartialProfile out;
        for (auto& [agent, steps] : built) out.assigned[agent] = Path{std::move(steps)};
        return out;
    }

private:
    bool agent_uses_edge(int agent, int edge) const {
        return se_.paths[static_cast<std::size_t>(agent)].contains_edge(edge);
    }

    void recurse(const detail::EpView& view, const std::vector<int>& agents,
                 std::map<int, std::vector<PathStep>>& built) {
        if (view.edges.size() == 1) {
            int e = *view.edges.begin();
            for (int a : agents)
                if (agent_uses_edge(a, e)) assign_edge(e, a, built, /*prepend=*/false);
            return;
        }
        auto comps = detail::parallel_components(view);
        if (comps.size() > 1) {
            for (const auto& comp : comps) {
                detail::EpView child{view.net, comp, view.entry, view.exit};
                std::vector<int> touching;
                for (int a : agents)
                    for (int e : comp)
                        if (agent_uses_edge(a, e)) {
                            touching.push_back(a);
                            break;
                        }
                recurse(child, touching, built);
            }
            return;
        }
        // Series chain: peel an end edge, preferring the representation whose
        // extension edge carries more equilibrium users (sink side on ties).
        auto chain = detail::view_chain(view, limits_);
        if (chain.segments.size() < 2)
            throw DomainError("optimal subnetwork is not extension-parallel");
        NodeId first_cut = chain.junctions[1];
        NodeId last_cut = chain.junctions[chain.junctions.size() - 2];
        const std::set<int>& head = chain.segments.front();
        const std::set<int>& tail = chain.segments.back();

        auto se_users = [&](int edge) {
            int count = 0;
            for (int a = 0; a < game_.agent_count(); ++a)
                if (agent_uses_edge(a, edge)) ++count;
            return count;
        };

        bool head_is_edge = head.size() == 1;
        bool tail_is_edge = tail.size() == 1;
        if (!head_is_edge && !tail_is_edge)
            throw DomainError("optimal subnetwork is not extension-parallel");
        bool use_tail;
        if (head_is_edge && tail_is_edge)
            use_tail = se_users(*tail.begin()) >= se_users(*head.begin());
        else
            use_tail = tail_is_edge;

        int ext_edge = use_tail ? *tail.begin() : *head.begin();
        detail::EpView core{view.net, {}, use_tail ? view.entry : first_cut,
                            use_tail ? last_cut : view.exit};
        for (int e : view.edges)
            if (e != ext_edge) core.edges.insert(e);

        std::map<int, std::vector<PathStep>> core_built;
        recurse(core, agents, core_built);

        std::set<int> have_core;
        for (auto& [agent, steps] : core_built) {
            built[agent] = std::move(steps);
            assign_edge(ext_edge, agent, built, /*prepend=*/!use_tail);
            have_core.insert(agent);
        }
        // Step 3(c): remaining users of the extension edge get the first
        // available core path in canonical order.
        for (int a : agents) {
            if (have_core.count(a) || !agent_uses_edge(a, ext_edge)) continue;
            auto path = first_available_path(core);
            if (!path) continue;  // stays unassigned
            built[a] = std::move(*path);
            assign_edge(ext_edge, a, built, /*prepend=*/!use_tail);
            for (const auto& s : built[a])
                if (s.edge != ext_edge) ++usage_[static_cast<std::size_t>(s.edge)];
        }
    }

    void assign_edge(int edge, int agent, std::map<int, std::vector<PathStep>>& built,
                     bool prepend) {
        auto& steps = built[agent];
        PathStep step{edge, true};
        if (prepend)
            steps.insert(steps.begin(), step);
        else
            steps.push_back(step);
        ++usage_[static_cast<std::size_t>(edge)];
        if (usage_[static_cast<std::size_t>(edge)] > game_.network().edge(edge).capacity)
            throw DomainError("optimal profile chooser exceeded a capacity (internal error)");
    }

    std::optional<std::vector<PathStep>> first_available_path(const detail::EpView& core) {
        std::set<EdgeId> ids;
        for (int e : core.edges) ids.insert(game_.network().edge(e).id);
        Network sub = subnetwork_view(core, ids);
        auto paths = enumerate_paths(sub, core.entry, core.exit, limits_);
        for (const auto& p : paths) {
            bool ok = true;
            std::vector<int> need(static_cast<std::size_t>(game_.network().edge_count()), 0);
            for (const auto& s : p.steps) {
                int global = game_.network().edge_index(sub.edge(s.edge).id);
                ++need[static_cast<std::size_t>(global)];
                if (usage_[static_cast<std::size_t>(global)] +
                        need[static_cast<std::size_t>(global)] >
                    game_.network().edge(global).capacity) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            std::vector<PathStep> steps;
            for (const auto& s : p.steps)
                steps.push_back({game_.network().edge_index(sub.edge(s.edge).id), s.forward});
            return steps;
        }
        return std::nullopt;
    }

    Network subnetwork_view(const detail::EpView& view, const std::set<EdgeId>& ids) {
        std::set<NodeId> keep{view.entry, view.exit};
        std::vector<Edge> edges;
        for (const auto& e : game_.network().edges())
            if (ids.count(e.id)) {
                keep.insert(e.from);
                keep.insert(e.to);
                edges.push_back(e);
            }
        std::vector<NodeId> nodes;
        for (const auto& v : game_.network().nodes())
            if (keep.count(v)) nodes.push_back(v);
        return Network(std::move(nodes), std::move(edges), game_.network().directed(),
                       view.entry, view.exit);
    }

    const Game& game_;
    const StrategyProfile& se_;
    EnumLimits limits_;
    std::vector<int> usage_;
};

inline PartialProfile choose_optimal_profile(const Game& game, const Network& g_opt,
                                             const std::vector<int>& agents,
                                             const StrategyProfile& se_profile,
                                             const EnumLimits& limits = {}) {
    if (!game.network().directed())
        throw DomainError("choose_optimal_profile operates on directed networks");
    if (!classify(g_opt, limits).is_ep)
        throw DomainError("choose_optimal_profile needs an extension-parallel subnetwork");
    OptimalProfileChooser chooser(game, se_profile, limits);
    return chooser.choose(g_opt, agents);
}

// Complete a partial profile one agent at a time, always through edges the
// template profile uses; on series-parallel networks such a path exists
// whenever fewer agents are assigned than the template carries.
inline StrategyProfile extend_partial_profile(const Game& game, const Network& g_opt,
                                              const StrategyProfile& template_profile,
                                              const PartialProfile& partial,
                                              const EnumLimits& limits = {}) {
    const Network& net = game.network();
    std::set<EdgeId> allowed = used_edge_ids(net, template_profile);
    auto paths = enumerate_paths(g_opt, g_opt.source(), g_opt.sink(), limits);

    std::vector<int> usage(static_cast<std::size_t>(net.edge_count()), 0);
    StrategyProfile out;
    out.paths.resize(static_cast<std::size_t>(game.agent_count()));
    for (const auto& [agent, path] : partial.assigned) {
        out.paths[static_cast<std::size_t>(agent)] = path;
        for (const auto& s : path.steps) ++usage[static_cast<std::size_t>(s.edge)];
    }
    for (int a = 0; a < game.agent_count(); ++a) {
        if (partial.assigned.count(a)) continue;
        bool placed = false;
        for (const auto& p : paths) {
            bool ok = true;
            std::vector<int> need(static_cast<std::size_t>(net.edge_count()), 0);
            for (const auto& s : p.steps) {
                int global = net.edge_index(g_opt.edge(s.edge).id);
                if (!allowed.count(g_opt.edge(s.edge).id)) {
                    ok = false;
                    break;
                }
                ++need[static_cast<std::size_t>(global)];
                if (usage[static_cast<std::size_t>(global)] + need[static_cast<std::size_t>(global)] >
                    net.edge(global).capacity) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            Path mapped;
            for (const auto& s : p.steps)
                mapped.steps.push_back({net.edge_index(g_opt.edge(s.edge).id), s.forward});
            for (const auto& s : mapped.steps) ++usage[static_cast<std::size_t>(s.edge)];
            out.paths[static_cast<std::size_t>(a)] = std::move(mapped);
            placed = true;
            break;
        }
        if (!placed)
            throw DomainError("no completion path available for agent " + std::to_string(a));
    }
    return out;
}

struct CombinedInfeasibility {
    EdgeId edge;
    std::vector<int> coalition;
};

// (s*_C, s_{-C}) is feasible for every coalition C exactly when, per edge,
// the union of its users across the two profiles fits the capacity: the
// worst coalition takes every agent using the edge only in s* and nobody
// using it only in s.
inline std::optional<CombinedInfeasibility> check_combined_feasibility(
    const Game& game, const StrategyProfile& se_profile, const StrategyProfile& opt_profile) {
    const Network& net = game.network();
    for (int e = 0; e < net.edge_count(); ++e) {
        std::set<int> united;
        std::vector<int> star_users;
        for (int a = 0; a < game.agent_count(); ++a) {
            bool in_se = se_profile.paths[static_cast<std::size_t>(a)].contains_edge(e);
            bool in_opt = opt_profile.paths[static_cast<std::size_t>(a)].contains_edge(e);
            if (in_se || in_opt) united.insert(a);
            if (in_opt) star_users.push_back(a);
        }
        if (static_cast<int>(united.size()) > net.edge(e).capacity)
            return CombinedInfeasibility{net.edge(e).id, star_users};
    }
    return std::nullopt;
}

// Block-wise optimal profile for SPP games (symmetric or asymmetric): every
// agent whose equilibrium segment through a block survives in the optimal
// subnetwork keeps that segment; the rest take any available block path of
// the optimal subnetwork.
inline StrategyProfile spp_optimal_profile(const Game& game, const std::set<EdgeId>& g_opt_edges,
                                           const StrategyProfile& se_profile,
                                           const EnumLimits& limits = {}) {
    const Network& net = game.network();
    auto chain = spp_chain(net, limits);

    std::vector<int> usage(static_cast<std::size_t>(net.edge_count()), 0);
    std::vector<std::vector<std::vector<PathStep>>> segments(
        static_cast<std::size_t>(game.agent_count()),
        std::vector<std::vector<PathStep>>(chain.blocks.size()));

    auto in_opt = [&](const std::vector<PathStep>& steps) {
        for (const auto& s : steps)
            if (!g_opt_edges.count(net.edge(s.edge).id)) return false;
        return true;
    };

    // Which block does each step of an agent's path belong to?
    std::map<EdgeId, std::size_t> block_of;
    for (std::size_t b = 0; b < chain.blocks.size(); ++b)
        for (const auto& p : chain.blocks[b].paths)
            for (const auto& s : p) block_of[net.edge(s.edge).id] = b;

    struct Pending {
        int agent;
        std::size_t block;
    };
    std::vector<Pending> pending;
    for (int a = 0; a < game.agent_count(); ++a) {
        std::map<std::size_t, std::vector<PathStep>> per_block;
        for (const auto& s : se_profile.paths[static_cast<std::size_t>(a)].steps)
            per_block[block_of.at(net.edge(s.edge).id)].push_back(s);
        for (auto& [b, steps] : per_block) {
            bool full = false;
            for (const auto& p : chain.blocks[b].paths) {
                if (p.size() != steps.size()) continue;
                bool same = true;
                for (std::size_t i = 0; i < p.size(); ++i)
                    if (!(p[i] == steps[i])) same = false;
                if (same) full = true;
            }
            if (in_opt(steps)) {
                segments[static_cast<std::size_t>(a)][b] = steps;
                for (const auto& s : steps) ++usage[static_cast<std::size_t>(s.edge)];
            } else if (full) {
                pending.push_back({a, b});
            } else {
                throw DomainError(
                    "forced segment outside the optimal subnetwork; no optimal profile "
                    "can route agent " + std::to_string(a));
            }
        }
    }

    for (const auto& task : pending) {
        const auto& block = chain.blocks[task.block];
        bool placed = false;
        for (const auto& p : block.paths) {
            if (!in_opt(p)) continue;
            bool fits = true;
            std::vector<int> need(static_cast<std::size_t>(net.edge_count()), 0);
            for (const auto& s : p) {
                ++need[static_cast<std::size_t>(s.edge)];
                if (usage[static_cast<std::size_t>(s.edge)] + need[static_cast<std::size_t>(s.edge)] >
                    net.edge(s.edge).capacity)
                    fits = false;
            }
            if (!fits) continue;
            segments[static_cast<std::size_t>(task.agent)][task.block] = p;
            for (const auto& s : p) ++usage[static_cast<std::size_t>(s.edge)];
            placed = true;
            break;
        }
        if (!placed)
            throw DomainError("no available optimal block path for agent " +
                              std::to_string(task.agent));
    }

    StrategyProfile out;
    out.paths.resize(static_cast<std::size_t>(game.agent_count()));
    for (int a = 0; a < game.agent_count(); ++a) {
        auto& steps = out.paths[static_cast<std::size_t>(a)].steps;
        for (std::size_t b = 0; b < chain.blocks.size(); ++b)
            steps.insert(steps.end(), segments[static_cast<std::size_t>(a)][b].begin(),
                         segments[static_cast<std::size_t>(a)][b].end());
    }
    return out;
}

}  // namespace ccs
