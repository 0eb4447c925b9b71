#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccs/embedding.hpp"
#include "ccs/equilibria.hpp"
#include "ccs/game.hpp"
#include "ccs/optimal.hpp"
#include "ccs/topology.hpp"

namespace ccs {

// Every builder's numbers were fixed by solving the defining constraints and
// then re-verified against exhaustive equilibrium enumeration before being
// frozen here; the constraint list travels with the instance so the test
// suite can re-run that verification.
struct InstanceSpec {
    std::string tag;
    std::map<std::string, std::string> params;
    std::vector<std::string> constraints;
};

struct Instance {
    Game game;
    InstanceSpec spec;
};

// Two agents, one cheap direct edge against a shared stem with two branches.
// The unique Nash profile costs (1, 13/10) and the pair's joint move to the
// stem kills it, so no strong equilibrium exists.
inline Instance build_fig1() {
    Network net({"s", "v", "t"},
                {{"a", "s", "t", Rational(1), 1},
                 {"b", "s", "v", Rational(6, 5), 2},
                 {"c", "v", "t", Rational(1, 10), 1},
                 {"d", "v", "t", Rational(1, 2), 1}},
                true, "s", "t");
    Instance inst{Game::symmetric(std::move(net), 2),
                  {"fig1",
                   {},
                   {"path [a] alone costs 1",
                    "path [b,c] alone costs 13/10",
                    "joint move to [b,c],[b,d] costs 7/10 and 11/10",
                    "unique NE orbit ([a],[b,c])",
                    "no strong equilibrium"}}};
    return inst;
}

// Two agents on the Braess graph; the only Nash orbit {[a,x,d],[b,d]} is
// overturned by the pair deviating to {[a,c],[a,x,d]}.
inline Instance build_fig2_braess() {
    Network net({"s", "u", "v", "t"},
                {{"a", "s", "u", Rational(4), 2},
                 {"b", "s", "v", Rational(3), 1},
                 {"c", "u", "t", Rational(2), 1},
                 {"d", "v", "t", Rational(1), 2},
                 {"x", "u", "v", Rational(0), 1}},
                true, "s", "t");
    Instance inst{Game::symmetric(std::move(net), 2),
                  {"fig2",
                   {},
                   {"network is the Braess graph (not series-parallel)",
                    "at least one NE exists",
                    "no strong equilibrium"}}};
    return inst;
}

// SP tightness: a chain of {cost-1 cap-1, free cap-(n-1)} edge pairs in
// parallel with a (1+eps, 1) direct edge. The unit-edge profile is a SE of
// cost n while the optimum routes one agent below for 1+eps.
inline Instance build_fig4_sp_spoa(int n, const Rational& eps) {
    if (n < 2) throw InputError("fig4 needs at least two agents");
    std::vector<NodeId> nodes{"s"};
    for (int i = 1; i < n; ++i) nodes.push_back("m" + std::to_string(i));
    nodes.push_back("t");
    std::vector<Edge> edges;
    edges.push_back({"low", "s", "t", Rational(1) + eps, 1});
    for (int i = 0; i < n; ++i) {
        NodeId from = i == 0 ? "s" : "m" + std::to_string(i);
        NodeId to = i == n - 1 ? "t" : "m" + std::to_string(i + 1);
        edges.push_back({"u" + std::to_string(i), from, to, Rational(1), 1});
        edges.push_back({"z" + std::to_string(i), from, to, Rational(0), n - 1});
    }
    Network net(std::move(nodes), std::move(edges), true, "s", "t");
    Instance inst{Game::symmetric(std::move(net), n),
                  {"fig4",
                   {{"n", std::to_string(n)}, {"eps", to_string(eps)}},
                   {"the one-unit-edge-per-agent profile is a SE of cost n",
                    "optimum is 1+eps via the direct edge plus the free chain",
                    "SPoA equals n/(1+eps)"}}};
    return inst;
}

// Unbounded SPoA off series-parallel ground: the outer profile is a SE that
// pays for the 24R edge, while rerouting through the inner edge brings the
// optimum down to 24.
inline Instance build_fig5_unbounded_spoa(const Rational& r) {
    Network net({"s", "u", "v", "w", "t"},
                {{"a", "s", "u", Rational(2), 1},
                 {"b", "s", "v", Rational(1), 1},
                 {"c1", "u", "w", Rational(1), 1},
                 {"c2", "w", "t", Rational(1), 1},
                 {"f", "u", "t", Rational(2), 1},
                 {"i", "v", "w", Rational(18), 1},
                 {"big", "v", "t", Rational(24) * r, 1}},
                true, "s", "t");
    Instance inst{Game::symmetric(std::move(net), 2),
                  {"fig5",
                   {{"r", to_string(r)}},
                   {"network is not series-parallel",
                    "the no-inner-edge profile {[a,c1,c2],[b,big]} is a SE of cost 24R+5",
                    "the optimum avoids the 24R edge and costs 24"}}};
    return inst;
}

// SP network where every SE costs n: an upper chain of {free cap-(n-2),
// unit cap-1} pairs, a direct unit edge, and a shared (1+eps, 2) detour
// whose branches cost 0 and 1/2. Optimum: 3/2 + eps.
inline Instance build_fig6_sp_spos(int n, const Rational& eps) {
    if (n < 3) throw InputError("fig6 needs at least three agents");
    std::vector<NodeId> nodes{"s"};
    for (int i = 1; i <= n - 2; ++i) nodes.push_back("v" + std::to_string(i));
    nodes.push_back("u");
    nodes.push_back("t");
    std::vector<Edge> edges;
    for (int i = 0; i < n - 1; ++i) {
        NodeId from = i == 0 ? "s" : "v" + std::to_string(i);
        NodeId to = i == n - 2 ? "t" : "v" + std::to_string(i + 1);
        edges.push_back({"one" + std::to_string(i), from, to, Rational(1), 1});
        edges.push_back({"zero" + std::to_string(i), from, to, Rational(0), n - 2});
    }
    edges.push_back({"direct", "s", "t", Rational(1), 1});
    edges.push_back({"stem", "s", "u", Rational(1) + eps, 2});
    edges.push_back({"cheap", "u", "t", Rational(0), 1});
    edges.push_back({"half", "u", "t", Rational(1, 2), 1});
    Network net(std::move(nodes), std::move(edges), true, "s", "t");
    Instance inst{Game::symmetric(std::move(net), n),
                  {"fig6",
                   {{"n", std::to_string(n)}, {"eps", to_string(eps)}},
                   {"every SE has social cost n (each agent pays 1)",
                    "optimum routes two agents through the stem for 3/2+eps",
                    "SPoS equals n/(3/2+eps)"}}};
    return inst;
}

// Unbounded SPoS: the unique SE sends one agent along the zero-ish path for
// 3/5 and locks the other onto the R edge for R+13/10.
inline Instance build_fig7_unbounded_spos(const Rational& r) {
    Network net({"s", "a", "b", "c", "d", "e", "t"},
                {{"sa", "s", "a", Rational(1), 2},
                 {"se", "s", "e", Rational(1, 2), 1},
                 {"ab", "a", "b", Rational(3, 10), 2},
                 {"ac", "a", "c", Rational(1, 5), 1},
                 {"cd", "c", "d", Rational(0), 1},
                 {"db", "d", "b", Rational(0), 1},
                 {"dt", "d", "t", Rational(11, 20), 1},
                 {"ec", "e", "c", Rational(0), 1},
                 {"et", "e", "t", Rational(1, 2), 1},
                 {"bt", "b", "t", Rational(1, 10), 1},
                 {"btR", "b", "t", r, 1}},
                true, "s", "t");
    Instance inst{Game::symmetric(std::move(net), 2),
                  {"fig7",
                   {{"r", to_string(r)}},
                   {"path [se,et] costs 1",
                    "unique SE {[se,ec,cd,db,bt],[sa,ab,btR]} with costs 3/5 and R+13/10",
                    "every SE uses the R edge; the optimum avoids it"}}};
    return inst;
}

// Asymmetric EP example with SPoA = R: agent 1 (sink t1) is shut out of the
// free edge by agent 2's free route, so the SE burns the R edge while the
// optimum costs 1.
inline Instance build_fig8_asymmetric(const Rational& r) {
    Network net({"s", "t1", "t2"},
                {{"big", "s", "t1", r, 1},
                 {"free", "s", "t1", Rational(0), 1},
                 {"hop", "t1", "t2", Rational(0), 1},
                 {"one", "s", "t2", Rational(1), 1}},
                true, "s", "t2");
    Instance inst{Game::asymmetric(std::move(net), {{"s", "t1"}, {"s", "t2"}}),
                  {"fig8",
                   {{"r", to_string(r)}},
                   {"network is extension-parallel",
                    "{[big],[free,hop]} is a SE of cost R",
                    "optimum is 1 ({[free],[one]})",
                    "SPoA equals R"}}};
    return inst;
}

// Consistent six-agent instance for the optimal-profile walkthrough: the
// cap-4 edge absorbs one extra user in the copied optimum, the second extra
// is left unassigned and completed through the bottom edge later.
inline Instance build_walkthrough_ep() {
    Network net({"s", "m", "t"},
                {{"e8", "s", "m", Rational(8), 4},
                 {"e4", "s", "m", Rational(4), 2},
                 {"e5", "m", "t", Rational(5), 5},
                 {"lo", "s", "t", Rational(8), 2}},
                true, "s", "t");
    Instance inst{Game::symmetric(std::move(net), 6),
                  {"walkthrough",
                   {},
                   {"{e8,e5}x3, {e4,e5}x2, {lo}x1 is a SE",
                    "optimum uses e8, e5, lo and costs 21",
                    "the chooser copies e8 to its three users, promotes one e4 user, "
                    "and leaves the other unassigned"}}};
    return inst;
}

// Thm 5 emulation: find a forbidden pattern inside the host, seed it with
// the matching no-SE game, and price the derivation operations so every
// profile of the host game mirrors a profile of the seed game. Subdivided
// pieces carry (p, c) then (0, c); added edges are capacity 0; extension
// edges are free with capacity n.
inline Game build_no_se_game(const Network& host, const EnumLimits& limits = {}) {
    if (classify(host, limits).is_spp)
        throw DomainError("build_no_se_game needs a non-SPP network");
    auto witness = find_forbidden_embedding(host, limits);
    if (!witness)
        throw DomainError(
            "non-SPP network without a forbidden embedding; the pattern "
            "reconstruction would be falsified");

    std::map<EdgeId, std::pair<Rational, int>> seed;
    switch (witness->pattern) {
        case ForbiddenPattern::BraessGraph:
            seed = {{"su", {Rational(4), 2}},
                    {"sv", {Rational(3), 1}},
                    {"ut", {Rational(2), 1}},
                    {"vt", {Rational(1), 2}},
                    {"uv", {Rational(0), 1}}};
            break;
        case ForbiddenPattern::EdgeThenParallel:
            seed = {{"top", {Rational(1), 1}},
                    {"stem", {Rational(6, 5), 2}},
                    {"branch1", {Rational(1, 10), 1}},
                    {"branch2", {Rational(1, 2), 1}}};
            break;
        case ForbiddenPattern::ParallelThenEdge:
            seed = {{"top", {Rational(1), 1}},
                    {"branch1", {Rational(1, 10), 1}},
                    {"branch2", {Rational(1, 2), 1}},
                    {"stem", {Rational(6, 5), 2}}};
            break;
    }

    const int agents = 2;
    std::map<EdgeId, std::pair<Rational, int>> assignment;
    for (const auto& [pattern_edge, host_path] : witness->edge_paths) {
        const auto& [cost, cap] = seed.at(pattern_edge);
        for (std::size_t i = 0; i < host_path.size(); ++i)
            assignment[host_path[i]] = {i == 0 ? cost : Rational(0), cap};
    }
    for (const auto& id : witness->source_tail) assignment[id] = {Rational(0), agents};
    for (const auto& id : witness->sink_tail) assignment[id] = {Rational(0), agents};
    for (const auto& path : witness->spacer_paths)
        for (const auto& id : path) assignment[id] = {Rational(0), agents};
    for (const auto& path : witness->added_paths)
        for (const auto& id : path) assignment[id] = {Rational(0), 0};

    std::vector<Edge> edges;
    for (const auto& e : host.edges()) {
        auto it = assignment.find(e.id);
        if (it == assignment.end())
            throw DomainError("embedding witness does not cover edge '" + e.id + "'");
        edges.push_back({e.id, e.from, e.to, it->second.first, it->second.second});
    }
    return Game::symmetric(
        Network(host.nodes(), std::move(edges), host.directed(), host.source(), host.sink()),
        agents);
}

// ---------------------------------------------------------------------------
// Seeded random games.

enum class NetworkClass { ParallelEdges, ParallelPaths, Spp, Ep, Sp, General, NonSpp };

struct RandomGameSpec {
    NetworkClass cls = NetworkClass::Spp;
    int agents = 2;
    int max_edges = 8;
    std::optional<int> uniform_capacity;  // homogeneous games when set
    std::uint64_t seed = 1;
};

namespace detail {

class RandomBuilder {
public:
    RandomBuilder(const RandomGameSpec& spec, std::uint64_t round)
        : spec_(spec), rng_(spec.seed * 1000003 + round) {}

    Network build_network() {
        switch (spec_.cls) {
            case NetworkClass::ParallelEdges:
                return parallel_edges();
            case NetworkClass::ParallelPaths:
                return parallel_paths();
            case NetworkClass::Spp:
                return spp();
            case NetworkClass::Ep:
                return recompose(ep_tree(pick(spec_.max_edges - 1) + 1));
            case NetworkClass::Sp:
                return recompose(sp_tree(pick(spec_.max_edges - 1) + 1));
            case NetworkClass::General:
                return general();
            case NetworkClass::NonSpp:
                // Alternate shapes; the caller filters on the classifier.
                return pick(2) == 0 ? recompose(sp_tree(pick(spec_.max_edges - 1) + 1))
                                    : general();
        }
        throw DomainError("unreachable network class");
    }

    Network assign_values(const Network& shape) {
        std::vector<Edge> edges;
        for (const auto& e : shape.edges()) {
            Edge ne = e;
            ne.cost = random_cost();
            ne.capacity = spec_.uniform_capacity ? *spec_.uniform_capacity
                                                 : static_cast<int>(pick(spec_.agents + 2));
            edges.push_back(std::move(ne));
        }
        return Network(shape.nodes(), std::move(edges), shape.directed(), shape.source(),
                       shape.sink());
    }

private:
    std::uint64_t pick(std::uint64_t bound) { return bound == 0 ? 0 : rng_() % bound; }

    Rational random_cost() {
        static const int numerators[] = {0, 1, 1, 2, 3, 4, 5, 6};
        static const int denominators[] = {1, 1, 2, 2, 3, 4};
        return Rational(numerators[pick(8)], denominators[pick(6)]);
    }

    Network parallel_edges() {
        int k = 2 + static_cast<int>(pick(static_cast<std::uint64_t>(
                        std::max(1, spec_.max_edges - 1))));
        std::vector<Edge> edges;
        for (int i = 0; i < k; ++i)
            edges.push_back({"e" + std::to_string(i), "s", "t", Rational(1), 1});
        return Network({"s", "t"}, std::move(edges), true, "s", "t");
    }

    Network parallel_paths() {
        int budget = std::max(2, spec_.max_edges);
        int paths = 1 + static_cast<int>(pick(3));
        std::vector<Network> parts;
        int used = 0;
        for (int p = 0; p < paths && used < budget; ++p) {
            int len = 1 + static_cast<int>(pick(3));
            len = std::min(len, budget - used);
            if (len <= 0) break;
            used += len;
            parts.push_back(chain_of_edges(len));
        }
        if (parts.empty()) parts.push_back(chain_of_edges(1));
        return parts.size() == 1 ? parts.front() : compose_parallel(parts);
    }

    Network spp() {
        int blocks = 1 + static_cast<int>(pick(3));
        std::vector<Network> parts;
        for (int b = 0; b < blocks; ++b) parts.push_back(parallel_paths_block());
        return parts.size() == 1 ? parts.front() : compose_series(parts);
    }

    Network parallel_paths_block() {
        int paths = 1 + static_cast<int>(pick(3));
        std::vector<Network> parts;
        for (int p = 0; p < paths; ++p) parts.push_back(chain_of_edges(1 + static_cast<int>(pick(2))));
        return parts.size() == 1 ? parts.front() : compose_parallel(parts);
    }

    Network chain_of_edges(int len) {
        std::vector<Network> parts;
        for (int i = 0; i < len; ++i) {
            Edge e{"e", "s", "t", Rational(1), 1};
            parts.push_back(Network({"s", "t"}, {e}, true, "s", "t"));
        }
        return parts.size() == 1 ? parts.front() : compose_series(parts);
    }

    DecompositionTree ep_tree(int budget) {
        if (budget <= 1) return DecompositionTree::leaf(next_leaf());
        switch (pick(3)) {
            case 0: {  // parallel split
                int left = 1 + static_cast<int>(pick(static_cast<std::uint64_t>(budget - 1)));
                std::vector<DecompositionTree> parts;
                parts.push_back(ep_tree(left));
                parts.push_back(ep_tree(budget - left));
                return DecompositionTree::parallel(std::move(parts));
            }
            case 1: {  // extend at the source
                std::vector<DecompositionTree> parts;
                parts.push_back(DecompositionTree::leaf(next_leaf()));
                parts.push_back(ep_tree(budget - 1));
                return DecompositionTree::series(std::move(parts));
            }
            default: {  // extend at the sink
                std::vector<DecompositionTree> parts;
                parts.push_back(ep_tree(budget - 1));
                parts.push_back(DecompositionTree::leaf(next_leaf()));
                return DecompositionTree::series(std::move(parts));
            }
        }
    }

    DecompositionTree sp_tree(int budget) {
        if (budget <= 1) return DecompositionTree::leaf(next_leaf());
        int left = 1 + static_cast<int>(pick(static_cast<std::uint64_t>(budget - 1)));
        std::vector<DecompositionTree> parts;
        parts.push_back(sp_tree(left));
        parts.push_back(sp_tree(budget - left));
        return pick(2) == 0 ? DecompositionTree::series(std::move(parts))
                            : DecompositionTree::parallel(std::move(parts));
    }

    Network general() {
        int pool = 2 + static_cast<int>(pick(4));
        std::vector<NodeId> nodes{"s", "t"};
        for (int i = 0; i < pool; ++i) nodes.push_back("n" + std::to_string(i));
        std::vector<Edge> edges;
        int walks = 2 + static_cast<int>(pick(3));
        for (int w = 0; w < walks && static_cast<int>(edges.size()) < spec_.max_edges; ++w) {
            // A random simple s-t walk over the pool.
            std::vector<NodeId> mids;
            for (int i = 0; i < pool; ++i)
                if (pick(2) == 0) mids.push_back("n" + std::to_string(i));
            for (std::size_t i = 0; i + 1 < mids.size(); ++i)
                std::swap(mids[i], mids[i + pick(mids.size() - i)]);
            std::vector<NodeId> walk{"s"};
            for (const auto& m : mids) walk.push_back(m);
            walk.push_back("t");
            for (std::size_t i = 0;
                 i + 1 < walk.size() && static_cast<int>(edges.size()) < spec_.max_edges; ++i)
                edges.push_back({"e" + std::to_string(edges.size()), walk[i], walk[i + 1],
                                 Rational(1), 1});
        }
        std::set<NodeId> touched{"s", "t"};
        for (const auto& e : edges) {
            touched.insert(e.from);
            touched.insert(e.to);
        }
        std::vector<NodeId> kept;
        for (const auto& v : nodes)
            if (touched.count(v)) kept.push_back(v);
        return Network(std::move(kept), std::move(edges), true, "s", "t");
    }

    std::string next_leaf() { return "e" + std::to_string(leaf_counter_++); }

    RandomGameSpec spec_;
    std::mt19937_64 rng_;
    int leaf_counter_ = 0;
};

}  // namespace detail

// Reproducible generator: a random shape of the requested class, random
// grid costs and capacities, rejection-sampled until the class flags hold
// and the game is feasible.
inline Game random_game(const RandomGameSpec& spec, const EnumLimits& limits = {}) {
    for (std::uint64_t round = 0; round < 400; ++round) {
        detail::RandomBuilder builder(spec, round);
        Network shape = [&]() -> Network {
            try {
                return builder.build_network();
            } catch (const InputError&) {
                return Network({"s", "t"}, {{"e0", "s", "t", Rational(1), 1}}, true, "s", "t");
            }
        }();
        if (shape.edge_count() > spec.max_edges || shape.edge_count() == 0) continue;

        TopologyClass cls;
        try {
            cls = classify(shape, limits);
        } catch (const InputError&) {
            continue;  // stray edges off every path; redraw
        }
        bool class_ok = false;
        switch (spec.cls) {
            case NetworkClass::ParallelEdges: class_ok = cls.is_parallel_edges; break;
            case NetworkClass::ParallelPaths: class_ok = cls.is_parallel_paths; break;
            case NetworkClass::Spp: class_ok = cls.is_spp; break;
            case NetworkClass::Ep: class_ok = cls.is_ep; break;
            case NetworkClass::Sp: class_ok = cls.is_sp; break;
            case NetworkClass::General: class_ok = true; break;
            case NetworkClass::NonSpp: class_ok = !cls.is_spp; break;
        }
        if (!class_ok) continue;

        Network net = builder.assign_values(shape);
        Game game = Game::symmetric(std::move(net), spec.agents);
        detail::FlowSolver flow(game.network(),
                                game.network().edge_count() >= 62
                                    ? ~std::uint64_t{0} >> 2
                                    : (std::uint64_t{1} << game.network().edge_count()) - 1);
        if (flow.max_flow(spec.agents) < spec.agents) continue;
        return game;
    }
    throw DomainError("random_game failed to draw a feasible instance of the requested class");
}

}  // namespace ccs
