#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ccs/game.hpp"

namespace ccs {

// Canonical series/parallel decomposition tree. Series children are ordered
// by flow direction; parallel children are sorted by key; neither nesting of
// a kind inside itself survives canonicalization.
struct DecompositionTree {
    enum class Kind { Edge, Series, Parallel };
    Kind kind = Kind::Edge;
    EdgeId edge;
    std::vector<DecompositionTree> children;

    static DecompositionTree leaf(EdgeId id) {
        DecompositionTree t;
        t.kind = Kind::Edge;
        t.edge = std::move(id);
        return t;
    }

    std::string key() const {
        switch (kind) {
            case Kind::Edge:
                return "e[" + edge + "]";
            case Kind::Series: {
                std::string k = "s(";
                for (const auto& c : children) k += c.key() + ",";
                return k + ")";
            }
            case Kind::Parallel: {
                std::string k = "p(";
                for (const auto& c : children) k += c.key() + ",";
                return k + ")";
            }
        }
        return "";
    }

    int leaf_count() const {
        if (kind == Kind::Edge) return 1;
        int n = 0;
        for (const auto& c : children) n += c.leaf_count();
        return n;
    }

    static DecompositionTree series(std::vector<DecompositionTree> parts) {
        DecompositionTree t;
        t.kind = Kind::Series;
        for (auto& p : parts) {
            if (p.kind == Kind::Series)
                for (auto& c : p.children) t.children.push_back(std::move(c));
            else
                t.children.push_back(std::move(p));
        }
        if (t.children.size() == 1) return std::move(t.children.front());
        return t;
    }

    static DecompositionTree parallel(std::vector<DecompositionTree> parts) {
        DecompositionTree t;
        t.kind = Kind::Parallel;
        for (auto& p : parts) {
            if (p.kind == Kind::Parallel)
                for (auto& c : p.children) t.children.push_back(std::move(c));
            else
                t.children.push_back(std::move(p));
        }
        if (t.children.size() == 1) return std::move(t.children.front());
        std::sort(t.children.begin(), t.children.end(),
                  [](const DecompositionTree& a, const DecompositionTree& b) {
                      return a.key() < b.key();
                  });
        return t;
    }
};

struct TopologyClass {
    bool is_parallel_edges = false;
    bool is_parallel_paths = false;
    bool is_spp = false;
    bool is_ep = false;
    bool is_sp = false;
};

struct SpObstruction {
    NodeId node_a;
    NodeId node_b;
};

struct DecompositionResult {
    std::optional<DecompositionTree> tree;      // set when the network is SP
    std::optional<SpObstruction> obstruction;   // set when it is not
    bool is_sp() const { return tree.has_value(); }
};

namespace detail {

// Orient an undirected two-terminal network by the direction its edges are
// used in simple s-t paths. In an undirected SP network every edge is used
// in one direction only (Milchtaich); a two-way edge certifies non-SP.
struct Orientation {
    std::optional<Network> network;  // directed twin, same edge ids
    std::optional<SpObstruction> conflict;
    std::vector<EdgeId> unused_edges;
};

inline Orientation orient_undirected(const Network& net, const EnumLimits& limits = {}) {
    Orientation out;
    auto paths = enumerate_paths(net, net.source(), net.sink(), limits);
    std::vector<int> fwd(static_cast<std::size_t>(net.edge_count()), 0);
    std::vector<int> bwd(static_cast<std::size_t>(net.edge_count()), 0);
    for (const auto& p : paths)
        for (const auto& s : p.steps)
            (s.forward ? fwd : bwd)[static_cast<std::size_t>(s.edge)] = 1;
    for (int e = 0; e < net.edge_count(); ++e) {
        auto i = static_cast<std::size_t>(e);
        if (!fwd[i] && !bwd[i]) out.unused_edges.push_back(net.edge(e).id);
        if (fwd[i] && bwd[i]) {
            out.conflict = SpObstruction{net.edge(e).from, net.edge(e).to};
            return out;
        }
    }
    if (!out.unused_edges.empty()) return out;
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(net.edge_count()));
    for (int e = 0; e < net.edge_count(); ++e) {
        Edge copy = net.edge(e);
        if (bwd[static_cast<std::size_t>(e)]) std::swap(copy.from, copy.to);
        edges.push_back(std::move(copy));
    }
    out.network = Network(net.nodes(), std::move(edges), true, net.source(), net.sink());
    return out;
}

struct ReductionEdge {
    NodeId from;
    NodeId to;
    DecompositionTree tree;
};

}  // namespace detail

// Series/parallel reduction: merge same-endpoint edge pairs, contract
// interior nodes of in-degree 1 and out-degree 1, succeed on a single
// source->sink edge. Edges off every s-t path are rejected by name.
inline DecompositionResult decompose_sp(const Network& input, const EnumLimits& limits = {}) {
    if (input.edge_count() == 0) throw InputError("cannot decompose an empty network");

    const Network* netp = &input;
    std::optional<Network> oriented;
    if (!input.directed()) {
        auto o = detail::orient_undirected(input, limits);
        if (!o.unused_edges.empty()) {
            std::string msg = "edges not on any source-sink path:";
            for (const auto& id : o.unused_edges) msg += " " + id;
            throw InputError(msg);
        }
        if (o.conflict) return DecompositionResult{std::nullopt, o.conflict};
        oriented = std::move(o.network);
        netp = &*oriented;
    }
    const Network& net = *netp;

    {
        auto paths = enumerate_paths(net, net.source(), net.sink(), limits);
        std::vector<char> used(static_cast<std::size_t>(net.edge_count()), 0);
        for (const auto& p : paths)
            for (const auto& s : p.steps) used[static_cast<std::size_t>(s.edge)] = 1;
        std::string missing;
        for (int e = 0; e < net.edge_count(); ++e)
            if (!used[static_cast<std::size_t>(e)]) missing += " " + net.edge(e).id;
        if (!missing.empty())
            throw InputError("edges not on any source-sink path:" + missing);
    }

    std::vector<detail::ReductionEdge> edges;
    for (int e = 0; e < net.edge_count(); ++e)
        edges.push_back({net.edge(e).from, net.edge(e).to,
                         DecompositionTree::leaf(net.edge(e).id)});

    bool changed = true;
    while (changed && edges.size() > 1) {
        changed = false;
        // Parallel merge: fold all edges sharing endpoints into one.
        std::map<std::pair<NodeId, NodeId>, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < edges.size(); ++i)
            groups[{edges[i].from, edges[i].to}].push_back(i);
        for (auto& [ends, idxs] : groups) {
            if (idxs.size() < 2) continue;
            std::vector<DecompositionTree> parts;
            for (auto i : idxs) parts.push_back(std::move(edges[i].tree));
            detail::ReductionEdge merged{ends.first, ends.second,
                                         DecompositionTree::parallel(std::move(parts))};
            std::vector<detail::ReductionEdge> next;
            std::set<std::size_t> dead(idxs.begin(), idxs.end());
            for (std::size_t i = 0; i < edges.size(); ++i)
                if (!dead.count(i)) next.push_back(std::move(edges[i]));
            next.push_back(std::move(merged));
            edges = std::move(next);
            changed = true;
            break;
        }
        if (changed) continue;
        // Series contraction at an interior degree-(1,1) node.
        std::map<NodeId, std::pair<int, int>> degree;  // node -> (in, out)
        for (const auto& e : edges) {
            degree[e.to].first++;
            degree[e.from].second++;
        }
        for (const auto& [v, deg] : degree) {
            if (v == net.source() || v == net.sink()) continue;
            if (deg.first != 1 || deg.second != 1) continue;
            std::size_t in_idx = edges.size(), out_idx = edges.size();
            for (std::size_t i = 0; i < edges.size(); ++i) {
                if (edges[i].to == v) in_idx = i;
                if (edges[i].from == v) out_idx = i;
            }
            std::vector<DecompositionTree> parts;
            parts.push_back(std::move(edges[in_idx].tree));
            parts.push_back(std::move(edges[out_idx].tree));
            detail::ReductionEdge joined{edges[in_idx].from, edges[out_idx].to,
                                         DecompositionTree::series(std::move(parts))};
            std::vector<detail::ReductionEdge> next;
            for (std::size_t i = 0; i < edges.size(); ++i)
                if (i != in_idx && i != out_idx) next.push_back(std::move(edges[i]));
            next.push_back(std::move(joined));
            edges = std::move(next);
            changed = true;
            break;
        }
    }

    if (edges.size() == 1 && edges.front().from == net.source() &&
        edges.front().to == net.sink())
        return DecompositionResult{std::move(edges.front().tree), std::nullopt};

    // Stalled: report an interior node that resists contraction.
    std::optional<SpObstruction> obstruction;
    std::set<NodeId> interior;
    for (const auto& e : edges) {
        if (e.from != net.source() && e.from != net.sink()) interior.insert(e.from);
        if (e.to != net.source() && e.to != net.sink()) interior.insert(e.to);
    }
    for (const auto& v : interior) {
        for (const auto& e : edges) {
            if (e.from == v) {
                obstruction = SpObstruction{v, e.to};
                break;
            }
        }
        if (obstruction) break;
    }
    if (!obstruction) obstruction = SpObstruction{net.source(), net.sink()};
    return DecompositionResult{std::nullopt, obstruction};
}

namespace detail {

// A bare chain: a single edge or a series of edges, no parallel inside.
inline bool is_edge_chain(const DecompositionTree& t) {
    if (t.kind == DecompositionTree::Kind::Edge) return true;
    if (t.kind != DecompositionTree::Kind::Series) return false;
    for (const auto& c : t.children)
        if (c.kind != DecompositionTree::Kind::Edge) return false;
    return true;
}

inline bool is_parallel_paths_tree(const DecompositionTree& t) {
    if (is_edge_chain(t)) return true;
    if (t.kind != DecompositionTree::Kind::Parallel) return false;
    for (const auto& c : t.children)
        if (!is_edge_chain(c)) return false;
    return true;
}

inline bool is_parallel_edges_tree(const DecompositionTree& t) {
    if (t.kind == DecompositionTree::Kind::Edge) return true;
    if (t.kind != DecompositionTree::Kind::Parallel) return false;
    for (const auto& c : t.children)
        if (c.kind != DecompositionTree::Kind::Edge) return false;
    return true;
}

inline bool is_spp_tree(const DecompositionTree& t) {
    if (t.kind == DecompositionTree::Kind::Series) {
        for (const auto& c : t.children)
            if (c.kind != DecompositionTree::Kind::Edge && !is_parallel_paths_tree(c))
                return false;
        return true;
    }
    return is_parallel_paths_tree(t);
}

inline bool is_ep_tree(const DecompositionTree& t);

// A series chain is EP iff an end factor is a bare edge and the remaining
// chain is EP; extension can happen at either terminal, so try both peels.
inline bool is_ep_chain(const std::vector<DecompositionTree>& factors, std::size_t lo,
                        std::size_t hi) {
    if (hi - lo == 1) return is_ep_tree(factors[lo]);
    bool front = factors[lo].kind == DecompositionTree::Kind::Edge &&
                 is_ep_chain(factors, lo + 1, hi);
    if (front) return true;
    return factors[hi - 1].kind == DecompositionTree::Kind::Edge &&
           is_ep_chain(factors, lo, hi - 1);
}

inline bool is_ep_tree(const DecompositionTree& t) {
    switch (t.kind) {
        case DecompositionTree::Kind::Edge:
            return true;
        case DecompositionTree::Kind::Parallel:
            for (const auto& c : t.children)
                if (!is_ep_tree(c)) return false;
            return true;
        case DecompositionTree::Kind::Series:
            return is_ep_chain(t.children, 0, t.children.size());
    }
    return false;
}

}  // namespace detail

inline TopologyClass classify_tree(const DecompositionTree& tree) {
    TopologyClass c;
    c.is_sp = true;
    c.is_spp = detail::is_spp_tree(tree);
    c.is_ep = detail::is_ep_tree(tree);
    c.is_parallel_paths = detail::is_parallel_paths_tree(tree);
    c.is_parallel_edges = detail::is_parallel_edges_tree(tree);
    return c;
}

inline TopologyClass classify(const Network& net, const EnumLimits& limits = {}) {
    auto d = decompose_sp(net, limits);
    if (!d.is_sp()) return TopologyClass{};
    return classify_tree(*d.tree);
}

// Series composition identifies sink_i with source_{i+1}; parallel
// composition identifies all sources and all sinks. Junction nodes get
// fresh ids; edge ids keep their names unless they collide, in which case
// a positional suffix disambiguates.
namespace detail {

inline std::string fresh_id(std::set<std::string>& taken, const std::string& want,
                            std::size_t component) {
    if (taken.insert(want).second) return want;
    std::string alt = want + "#" + std::to_string(component);
    int salt = 0;
    while (!taken.insert(alt).second) alt = want + "#" + std::to_string(component) + "_" + std::to_string(++salt);
    return alt;
}

}  // namespace detail

inline Network compose_series(const std::vector<Network>& parts) {
    if (parts.empty()) throw InputError("series composition of nothing");
    bool directed = parts.front().directed();
    std::set<std::string> node_ids, edge_ids;
    std::vector<NodeId> nodes;
    std::vector<Edge> edges;
    std::vector<NodeId> junction(parts.size() + 1);
    // Junctions first so interior node renaming cannot steal their ids.
    for (std::size_t i = 0; i <= parts.size(); ++i) {
        std::string want = i == 0 ? "s" : (i == parts.size() ? "t" : "j" + std::to_string(i));
        junction[i] = detail::fresh_id(node_ids, want, i);
        nodes.push_back(junction[i]);
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Network& part = parts[i];
        if (part.directed() != directed) throw InputError("mixed directedness in composition");
        std::map<NodeId, NodeId> rename;
        rename[part.source()] = junction[i];
        rename[part.sink()] = junction[i + 1];
        for (const auto& v : part.nodes()) {
            if (rename.count(v)) continue;
            NodeId nv = detail::fresh_id(node_ids, v, i);
            rename[v] = nv;
            nodes.push_back(nv);
        }
        for (const auto& e : part.edges()) {
            Edge ne = e;
            ne.id = detail::fresh_id(edge_ids, e.id, i);
            ne.from = rename.at(e.from);
            ne.to = rename.at(e.to);
            edges.push_back(std::move(ne));
        }
    }
    return Network(std::move(nodes), std::move(edges), directed, junction.front(),
                   junction.back());
}

inline Network compose_parallel(const std::vector<Network>& parts) {
    if (parts.empty()) throw InputError("parallel composition of nothing");
    bool directed = parts.front().directed();
    std::set<std::string> node_ids, edge_ids;
    std::vector<NodeId> nodes;
    std::vector<Edge> edges;
    NodeId source = detail::fresh_id(node_ids, "s", 0);
    NodeId sink = detail::fresh_id(node_ids, "t", 0);
    nodes.push_back(source);
    nodes.push_back(sink);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Network& part = parts[i];
        if (part.directed() != directed) throw InputError("mixed directedness in composition");
        std::map<NodeId, NodeId> rename;
        rename[part.source()] = source;
        rename[part.sink()] = sink;
        for (const auto& v : part.nodes()) {
            if (rename.count(v)) continue;
            NodeId nv = detail::fresh_id(node_ids, v, i);
            rename[v] = nv;
            nodes.push_back(nv);
        }
        for (const auto& e : part.edges()) {
            Edge ne = e;
            ne.id = detail::fresh_id(edge_ids, e.id, i);
            ne.from = rename.at(e.from);
            ne.to = rename.at(e.to);
            edges.push_back(std::move(ne));
        }
    }
    return Network(std::move(nodes), std::move(edges), directed, source, sink);
}

// Rebuild a network from a decomposition tree (single-edge leaves carry unit
// placeholders for cost/capacity unless a lookup is provided).
inline Network recompose(const DecompositionTree& tree,
                         const std::map<EdgeId, Edge>* edge_data = nullptr) {
    switch (tree.kind) {
        case DecompositionTree::Kind::Edge: {
            Edge e{tree.edge, "s", "t", Rational(1), 1};
            if (edge_data) {
                auto it = edge_data->find(tree.edge);
                if (it != edge_data->end()) {
                    e.cost = it->second.cost;
                    e.capacity = it->second.capacity;
                }
            }
            return Network({"s", "t"}, {e}, true, "s", "t");
        }
        case DecompositionTree::Kind::Series: {
            std::vector<Network> parts;
            for (const auto& c : tree.children) parts.push_back(recompose(c, edge_data));
            return compose_series(parts);
        }
        case DecompositionTree::Kind::Parallel: {
            std::vector<Network> parts;
            for (const auto& c : tree.children) parts.push_back(recompose(c, edge_data));
            return compose_parallel(parts);
        }
    }
    throw DomainError("unreachable tree kind");
}

// The SPP chain structure of a network: junction nodes shared by every
// source-sink path, and per block the simple paths crossing it. Junctions
// are ordered by their position along any path; for SPP (and any SP)
// networks every path visits all of them in the same order.
struct SppBlock {
    NodeId entry;
    NodeId exit;
    std::vector<std::vector<PathStep>> paths;  // each a simple entry->exit path
};

struct SppChain {
    std::vector<NodeId> junctions;  // source, cut nodes..., sink
    std::vector<SppBlock> blocks;
};

inline SppChain spp_chain(const Network& net, const EnumLimits& limits = {}) {
    auto all = enumerate_paths(net, net.source(), net.sink(), limits);
    if (all.empty()) throw InputError("network has no source-sink path");

    auto nodes_of = [&](const Path& p) {
        std::vector<NodeId> seq{net.source()};
        for (const auto& s : p.steps) {
            const Edge& e = net.edge(s.edge);
            seq.push_back(s.forward ? e.to : e.from);
        }
        return seq;
    };

    std::vector<NodeId> first = nodes_of(all.front());
    std::set<NodeId> common(first.begin(), first.end());
    for (const auto& p : all) {
        auto seq = nodes_of(p);
        std::set<NodeId> here(seq.begin(), seq.end());
        std::set<NodeId> keep;
        for (const auto& v : common)
            if (here.count(v)) keep.insert(v);
        common = std::move(keep);
    }

    SppChain chain;
    for (const auto& v : first)
        if (common.count(v)) chain.junctions.push_back(v);

    for (std::size_t j = 0; j + 1 < chain.junctions.size(); ++j) {
        SppBlock block;
        block.entry = chain.junctions[j];
        block.exit = chain.junctions[j + 1];
        std::set<std::string> seen;
        for (const auto& p : all) {
            auto seq = nodes_of(p);
            std::size_t a = 0, b = 0;
            for (std::size_t k = 0; k < seq.size(); ++k) {
                if (seq[k] == block.entry) a = k;
                if (seq[k] == block.exit) b = k;
            }
            std::vector<PathStep> segment(p.steps.begin() + static_cast<long>(a),
                                          p.steps.begin() + static_cast<long>(b));
            std::string key;
            for (const auto& s : segment) key += net.edge(s.edge).id + "\x1f";
            if (seen.insert(key).second) block.paths.push_back(std::move(segment));
        }
        std::sort(block.paths.begin(), block.paths.end(),
                  [&](const std::vector<PathStep>& a, const std::vector<PathStep>& b) {
                      std::vector<EdgeId> ka, kb;
                      for (const auto& s : a) ka.push_back(net.edge(s.edge).id);
                      for (const auto& s : b) kb.push_back(net.edge(s.edge).id);
                      return ka < kb;
                  });
        chain.blocks.push_back(std::move(block));
    }
    return chain;
}

}  // namespace ccs
