#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ccs/topology.hpp"

namespace ccs {

// The three minimal non-SPP networks. A network is SPP exactly when none of
// them embeds into it. Embedding means the host can be produced from the
// pattern by subdivisions, edge additions, terminal extensions, and forced
// vertex splits (splitting a node into an edge all of whose head traffic or
// tail traffic must cross it); the last op is what lets a pattern's sink sit
// mid-chain, with the spacer edge priced like an extension edge.
enum class ForbiddenPattern { BraessGraph, EdgeThenParallel, ParallelThenEdge };

inline std::string to_string(ForbiddenPattern p) {
    switch (p) {
        case ForbiddenPattern::BraessGraph: return "braess";
        case ForbiddenPattern::EdgeThenParallel: return "edge_then_parallel";
        case ForbiddenPattern::ParallelThenEdge: return "parallel_then_edge";
    }
    return "?";
}

struct PatternGraph {
    ForbiddenPattern tag;
    std::vector<NodeId> nodes;  // nodes[0] = source, nodes[1] = sink
    std::vector<std::pair<EdgeId, std::pair<NodeId, NodeId>>> edges;
};

inline const std::vector<PatternGraph>& forbidden_patterns() {
    static const std::vector<PatternGraph> patterns = {
        {ForbiddenPattern::BraessGraph,
         {"s", "t", "u", "v"},
         {{"su", {"s", "u"}},
          {"sv", {"s", "v"}},
          {"uv", {"u", "v"}},
          {"ut", {"u", "t"}},
          {"vt", {"v", "t"}}}},
        {ForbiddenPattern::EdgeThenParallel,
         {"s", "t", "v"},
         {{"top", {"s", "t"}},
          {"stem", {"s", "v"}},
          {"branch1", {"v", "t"}},
          {"branch2", {"v", "t"}}}},
        {ForbiddenPattern::ParallelThenEdge,
         {"s", "t", "v"},
         {{"top", {"s", "t"}},
          {"branch1", {"s", "v"}},
          {"branch2", {"s", "v"}},
          {"stem", {"v", "t"}}}},
    };
    return patterns;
}

// How the pattern sits inside the host. Pattern edges map to host paths;
// host terminals reach the mapped pattern terminals through the tail paths;
// spacer paths are collapsed by forced vertex splits; every remaining host
// edge belongs to an added path. The ops transcript replays the reduction
// that produced the witness, which is what validate_witness re-executes.
struct EmbeddingWitness {
    ForbiddenPattern pattern;
    std::map<NodeId, NodeId> node_map;                 // pattern node -> host node
    std::map<EdgeId, std::vector<EdgeId>> edge_paths;  // pattern edge -> host path
    std::vector<EdgeId> source_tail;                   // host source -> mapped source
    std::vector<EdgeId> sink_tail;                     // mapped sink -> host sink
    std::vector<std::vector<EdgeId>> spacer_paths;     // forced-split spacers
    std::vector<std::vector<EdgeId>> added_paths;      // in replay (addition) order

    struct Op {
        enum class Kind { Smooth, TrimSource, TrimSink, Contract, Delete };
        Kind kind;
        NodeId node;    // Smooth: the smoothed node
        EdgeId anchor;  // Contract/Delete: first host edge of the current edge
    };
    std::vector<Op> ops;  // reduction order, host state first
};

namespace detail {

struct SearchEdge {
    NodeId from;
    NodeId to;
    std::vector<EdgeId> host_path;  // underlying host edges in flow order
};

struct SearchState {
    std::vector<SearchEdge> edges;
    NodeId source;
    NodeId sink;

    std::string shape_key() const {
        std::vector<std::string> items;
        items.reserve(edges.size());
        for (const auto& e : edges) items.push_back(e.from + ">" + e.to);
        std::sort(items.begin(), items.end());
        std::string k = source + "|" + sink + "|";
        for (const auto& i : items) k += i + ";";
        return k;
    }
};

// Isomorphism against a fixed pattern with terminals pinned to terminals.
// Patterns have at most two interior nodes, so trying every interior
// bijection is trivial.
inline std::optional<std::map<NodeId, NodeId>> match_pattern(const SearchState& st,
                                                             const PatternGraph& pat) {
    if (st.edges.size() != pat.edges.size()) return std::nullopt;
    std::set<NodeId> host_nodes{st.source, st.sink};
    for (const auto& e : st.edges) {
        host_nodes.insert(e.from);
        host_nodes.insert(e.to);
    }
    if (host_nodes.size() != pat.nodes.size()) return std::nullopt;

    std::vector<NodeId> host_interior;
    for (const auto& v : host_nodes)
        if (v != st.source && v != st.sink) host_interior.push_back(v);
    std::vector<NodeId> pat_interior(pat.nodes.begin() + 2, pat.nodes.end());
    if (host_interior.size() != pat_interior.size()) return std::nullopt;

    std::sort(host_interior.begin(), host_interior.end());
    do {
        std::map<NodeId, NodeId> to_host;  // pattern node -> state node
        to_host[pat.nodes[0]] = st.source;
        to_host[pat.nodes[1]] = st.sink;
        for (std::size_t i = 0; i < pat_interior.size(); ++i)
            to_host[pat_interior[i]] = host_interior[i];
        std::multiset<std::pair<NodeId, NodeId>> want, have;
        for (const auto& [id, ends] : pat.edges)
            want.insert({to_host.at(ends.first), to_host.at(ends.second)});
        for (const auto& e : st.edges) have.insert({e.from, e.to});
        if (want == have) return to_host;
    } while (std::next_permutation(host_interior.begin(), host_interior.end()));
    return std::nullopt;
}

// Assign pattern edges to the matched state's edges. Parallel pattern edges
// are interchangeable, so a greedy endpoint match is enough.
inline std::map<EdgeId, std::vector<EdgeId>> assign_edge_paths(
    const SearchState& st, const PatternGraph& pat, const std::map<NodeId, NodeId>& to_host) {
    std::map<EdgeId, std::vector<EdgeId>> out;
    std::vector<char> taken(st.edges.size(), 0);
    for (const auto& [id, ends] : pat.edges) {
        NodeId from = to_host.at(ends.first);
        NodeId to = to_host.at(ends.second);
        for (std::size_t i = 0; i < st.edges.size(); ++i) {
            if (taken[i] || st.edges[i].from != from || st.edges[i].to != to) continue;
            taken[i] = 1;
            out[id] = st.edges[i].host_path;
            break;
        }
    }
    return out;
}

struct SearchTranscript {
    std::vector<std::vector<EdgeId>> deleted;       // deletion order
    std::vector<std::vector<EdgeId>> contracted;    // contraction order
    std::vector<std::vector<EdgeId>> source_trims;  // trim order (outermost first)
    std::vector<std::vector<EdgeId>> sink_trims;    // trim order (outermost first)
    std::vector<EmbeddingWitness::Op> ops;
};

class EmbeddingSearch {
public:
    explicit EmbeddingSearch(const Network& host) : host_(host) {}

    std::optional<EmbeddingWitness> run() {
        SearchState st;
        st.source = host_.source();
        st.sink = host_.sink();
        for (int e = 0; e < host_.edge_count(); ++e)
            st.edges.push_back({host_.edge(e).from, host_.edge(e).to, {host_.edge(e).id}});
        SearchTranscript tr;
        return dfs(st, tr);
    }

private:
    using Op = EmbeddingWitness::Op;

    std::optional<EmbeddingWitness> dfs(SearchState& st, SearchTranscript& tr) {
        for (const auto& pat : forbidden_patterns()) {
            auto iso = match_pattern(st, pat);
            if (!iso) continue;
            EmbeddingWitness w;
            w.pattern = pat.tag;
            w.node_map = *iso;
            w.edge_paths = assign_edge_paths(st, pat, *iso);
            for (const auto& seg : tr.source_trims)
                w.source_tail.insert(w.source_tail.end(), seg.begin(), seg.end());
            // Sink trims peel outward-in; the walk from the mapped sink to the
            // host sink reads them innermost first.
            for (auto it = tr.sink_trims.rbegin(); it != tr.sink_trims.rend(); ++it)
                w.sink_tail.insert(w.sink_tail.end(), it->begin(), it->end());
            w.spacer_paths = tr.contracted;
            // Deletions are recorded reduction-first; replay adds them in
            // reverse so endpoints always exist by the time they are used.
            for (auto it = tr.deleted.rbegin(); it != tr.deleted.rend(); ++it)
                w.added_paths.push_back(*it);
            w.ops = tr.ops;
            return w;
        }
        if (st.edges.size() < 4) return std::nullopt;
        auto key = st.shape_key();
        if (failed_.count(key)) return std::nullopt;

        std::map<NodeId, std::pair<int, int>> deg;  // node -> (in, out)
        for (const auto& e : st.edges) {
            deg[e.to].first++;
            deg[e.from].second++;
        }

        // Smooth an interior degree-(1,1) node.
        for (const auto& [v, d] : deg) {
            if (v == st.source || v == st.sink) continue;
            if (d.first != 1 || d.second != 1) continue;
            std::size_t in_i = st.edges.size(), out_i = st.edges.size();
            for (std::size_t i = 0; i < st.edges.size(); ++i) {
                if (st.edges[i].to == v) in_i = i;
                if (st.edges[i].from == v) out_i = i;
            }
            if (in_i == out_i) continue;  // self loop, not smoothable
            SearchState next;
            next.source = st.source;
            next.sink = st.sink;
            SearchEdge merged;
            merged.from = st.edges[in_i].from;
            merged.to = st.edges[out_i].to;
            merged.host_path = st.edges[in_i].host_path;
            merged.host_path.insert(merged.host_path.end(), st.edges[out_i].host_path.begin(),
                                    st.edges[out_i].host_path.end());
            for (std::size_t i = 0; i < st.edges.size(); ++i)
                if (i != in_i && i != out_i) next.edges.push_back(st.edges[i]);
            next.edges.push_back(std::move(merged));
            tr.ops.push_back({Op::Kind::Smooth, v, {}});
            if (auto w = dfs(next, tr)) return w;
            tr.ops.pop_back();
        }

        // Trim an extension chain at either terminal.
        {
            int src_out = 0, src_in = 0, snk_out = 0, snk_in = 0;
            std::size_t src_edge = st.edges.size(), snk_edge = st.edges.size();
            for (std::size_t i = 0; i < st.edges.size(); ++i) {
                if (st.edges[i].from == st.source) {
                    ++src_out;
                    src_edge = i;
                }
                if (st.edges[i].to == st.source) ++src_in;
                if (st.edges[i].to == st.sink) {
                    ++snk_in;
                    snk_edge = i;
                }
                if (st.edges[i].from == st.sink) ++snk_out;
            }
            if (src_out == 1 && src_in == 0 && st.edges[src_edge].to != st.sink) {
                SearchState next;
                next.source = st.edges[src_edge].to;
                next.sink = st.sink;
                for (std::size_t i = 0; i < st.edges.size(); ++i)
                    if (i != src_edge) next.edges.push_back(st.edges[i]);
                tr.source_trims.push_back(st.edges[src_edge].host_path);
                tr.ops.push_back({Op::Kind::TrimSource, {}, {}});
                if (auto w = dfs(next, tr)) return w;
                tr.ops.pop_back();
                tr.source_trims.pop_back();
            }
            if (snk_in == 1 && snk_out == 0 && st.edges[snk_edge].from != st.source) {
                SearchState next;
                next.source = st.source;
                next.sink = st.edges[snk_edge].from;
                for (std::size_t i = 0; i < st.edges.size(); ++i)
                    if (i != snk_edge) next.edges.push_back(st.edges[i]);
                tr.sink_trims.push_back(st.edges[snk_edge].host_path);
                tr.ops.push_back({Op::Kind::TrimSink, {}, {}});
                if (auto w = dfs(next, tr)) return w;
                tr.ops.pop_back();
                tr.sink_trims.pop_back();
            }
        }

        // Contract a forced edge (inverse of a vertex split): legal when the
        // edge is its tail's only way out or its head's only way in, and the
        // merge neither fuses the terminals nor creates a self loop.
        for (std::size_t i = 0; i < st.edges.size(); ++i) {
            const auto& e = st.edges[i];
            if (e.from == e.to) continue;
            bool forced = deg[e.from].second == 1 || deg[e.to].first == 1;
            if (!forced) continue;
            bool terminal_fuse = (e.from == st.source && e.to == st.sink) ||
                                 (e.from == st.sink && e.to == st.source);
            if (terminal_fuse) continue;
            bool loop = false;
            for (std::size_t j = 0; j < st.edges.size(); ++j) {
                if (j == i) continue;
                const auto& o = st.edges[j];
                bool touches_both = (o.from == e.from || o.from == e.to) &&
                                    (o.to == e.from || o.to == e.to);
                if (touches_both) loop = true;
            }
            if (loop) continue;
            NodeId survivor = e.from;
            if (e.to == st.source || e.to == st.sink) survivor = e.to;
            NodeId absorbed = survivor == e.from ? e.to : e.from;
            SearchState next;
            next.source = st.source;
            next.sink = st.sink;
            for (std::size_t j = 0; j < st.edges.size(); ++j) {
                if (j == i) continue;
                SearchEdge copy = st.edges[j];
                if (copy.from == absorbed) copy.from = survivor;
                if (copy.to == absorbed) copy.to = survivor;
                next.edges.push_back(std::move(copy));
            }
            tr.contracted.push_back(e.host_path);
            tr.ops.push_back({Op::Kind::Contract, {}, e.host_path.front()});
            if (auto w = dfs(next, tr)) return w;
            tr.ops.pop_back();
            tr.contracted.pop_back();
        }

        // Delete one edge (inverse of an addition).
        for (std::size_t i = 0; i < st.edges.size(); ++i) {
            SearchState next;
            next.source = st.source;
            next.sink = st.sink;
            for (std::size_t j = 0; j < st.edges.size(); ++j)
                if (j != i) next.edges.push_back(st.edges[j]);
            tr.deleted.push_back(st.edges[i].host_path);
            tr.ops.push_back({Op::Kind::Delete, {}, st.edges[i].host_path.front()});
            if (auto w = dfs(next, tr)) return w;
            tr.ops.pop_back();
            tr.deleted.pop_back();
        }

        failed_.insert(std::move(key));
        return std::nullopt;
    }

    const Network& host_;
    std::set<std::string> failed_;
};

}  // namespace detail

inline std::optional<EmbeddingWitness> find_forbidden_embedding(const Network& input,
                                                                const EnumLimits& limits = {}) {
    const Network* host = &input;
    std::optional<Network> oriented;
    if (!input.directed()) {
        auto o = detail::orient_undirected(input, limits);
        if (!o.network)
            throw InputError(
                "embedding search on an undirected network requires a consistent "
                "edge orientation");
        oriented = std::move(o.network);
        host = &*oriented;
    }
    detail::EmbeddingSearch search(*host);
    return search.run();
}

// Re-executes the witness's reduction transcript on the host, verifying
// every op's precondition, then checks that the final state matches the
// pattern under the recorded node map and that the summary fields agree
// with the simulation.
inline bool validate_witness(const Network& host, const EmbeddingWitness& w) {
    const PatternGraph* pat = nullptr;
    for (const auto& p : forbidden_patterns())
        if (p.tag == w.pattern) pat = &p;
    if (!pat) return false;

    detail::SearchState st;
    st.source = host.source();
    st.sink = host.sink();
    for (int e = 0; e < host.edge_count(); ++e)
        st.edges.push_back({host.edge(e).from, host.edge(e).to, {host.edge(e).id}});

    detail::SearchTranscript sim;
    using Op = EmbeddingWitness::Op;
    for (const auto& op : w.ops) {
        std::map<NodeId, std::pair<int, int>> deg;
        for (const auto& e : st.edges) {
            deg[e.to].first++;
            deg[e.from].second++;
        }
        auto find_by_anchor = [&](const EdgeId& anchor) -> std::size_t {
            for (std::size_t i = 0; i < st.edges.size(); ++i)
                if (st.edges[i].host_path.front() == anchor) return i;
            return st.edges.size();
        };
        switch (op.kind) {
            case Op::Kind::Smooth: {
                if (op.node == st.source || op.node == st.sink) return false;
                if (deg[op.node] != std::make_pair(1, 1)) return false;
                std::size_t in_i = st.edges.size(), out_i = st.edges.size();
                for (std::size_t i = 0; i < st.edges.size(); ++i) {
                    if (st.edges[i].to == op.node) in_i = i;
                    if (st.edges[i].from == op.node) out_i = i;
                }
                if (in_i >= st.edges.size() || out_i >= st.edges.size() || in_i == out_i)
                    return false;
                detail::SearchEdge merged;
                merged.from = st.edges[in_i].from;
                merged.to = st.edges[out_i].to;
                merged.host_path = st.edges[in_i].host_path;
                merged.host_path.insert(merged.host_path.end(),
                                        st.edges[out_i].host_path.begin(),
                                        st.edges[out_i].host_path.end());
                std::vector<detail::SearchEdge> next;
                for (std::size_t i = 0; i < st.edges.size(); ++i)
                    if (i != in_i && i != out_i) next.push_back(st.edges[i]);
                next.push_back(std::move(merged));
                st.edges = std::move(next);
                break;
            }
            case Op::Kind::TrimSource: {
                std::size_t edge = st.edges.size();
                int out = 0, in = 0;
                for (std::size_t i = 0; i < st.edges.size(); ++i) {
                    if (st.edges[i].from == st.source) {
                        ++out;
                        edge = i;
                    }
                    if (st.edges[i].to == st.source) ++in;
                }
                if (out != 1 || in != 0 || st.edges[edge].to == st.sink) return false;
                sim.source_trims.push_back(st.edges[edge].host_path);
                st.source = st.edges[edge].to;
                st.edges.erase(st.edges.begin() + static_cast<long>(edge));
                break;
            }
            case Op::Kind::TrimSink: {
                std::size_t edge = st.edges.size();
                int out = 0, in = 0;
                for (std::size_t i = 0; i < st.edges.size(); ++i) {
                    if (st.edges[i].to == st.sink) {
                        ++in;
                        edge = i;
                    }
                    if (st.edges[i].from == st.sink) ++out;
                }
                if (in != 1 || out != 0 || st.edges[edge].from == st.source) return false;
                sim.sink_trims.push_back(st.edges[edge].host_path);
                st.sink = st.edges[edge].from;
                st.edges.erase(st.edges.begin() + static_cast<long>(edge));
                break;
            }
            case Op::Kind::Contract: {
                std::size_t i = find_by_anchor(op.anchor);
                if (i >= st.edges.size()) return false;
                const auto e = st.edges[i];
                if (e.from == e.to) return false;
                if (!(deg[e.from].second == 1 || deg[e.to].first == 1)) return false;
                if ((e.from == st.source && e.to == st.sink) ||
                    (e.from == st.sink && e.to == st.source))
                    return false;
                for (std::size_t j = 0; j < st.edges.size(); ++j) {
                    if (j == i) continue;
                    const auto& o = st.edges[j];
                    if ((o.from == e.from || o.from == e.to) &&
                        (o.to == e.from || o.to == e.to))
                        return false;
                }
                NodeId survivor = e.from;
                if (e.to == st.source || e.to == st.sink) survivor = e.to;
                NodeId absorbed = survivor == e.from ? e.to : e.from;
                sim.contracted.push_back(e.host_path);
                std::vector<detail::SearchEdge> next;
                for (std::size_t j = 0; j < st.edges.size(); ++j) {
                    if (j == i) continue;
                    detail::SearchEdge copy = st.edges[j];
                    if (copy.from == absorbed) copy.from = survivor;
                    if (copy.to == absorbed) copy.to = survivor;
                    next.push_back(std::move(copy));
                }
                st.edges = std::move(next);
                break;
            }
            case Op::Kind::Delete: {
                std::size_t i = find_by_anchor(op.anchor);
                if (i >= st.edges.size()) return false;
                sim.deleted.push_back(st.edges[i].host_path);
                st.edges.erase(st.edges.begin() + static_cast<long>(i));
                break;
            }
        }
    }

    auto iso = detail::match_pattern(st, *pat);
    if (!iso || *iso != w.node_map) return false;

    // Summary fields must agree with the simulation.
    std::vector<EdgeId> source_tail, sink_tail;
    for (const auto& seg : sim.source_trims)
        source_tail.insert(source_tail.end(), seg.begin(), seg.end());
    for (auto it = sim.sink_trims.rbegin(); it != sim.sink_trims.rend(); ++it)
        sink_tail.insert(sink_tail.end(), it->begin(), it->end());
    if (source_tail != w.source_tail || sink_tail != w.sink_tail) return false;
    if (sim.contracted != w.spacer_paths) return false;
    std::vector<std::vector<EdgeId>> added;
    for (auto it = sim.deleted.rbegin(); it != sim.deleted.rend(); ++it) added.push_back(*it);
    if (added != w.added_paths) return false;

    // Edge-path map: same multiset of host paths per pattern endpoints, and
    // every host edge accounted for exactly once across all categories.
    std::set<EdgeId> used;
    auto mark = [&](const std::vector<EdgeId>& path) {
        for (const auto& id : path)
            if (!used.insert(id).second) throw InputError("duplicate edge in witness");
    };
    try {
        for (const auto& [id, path] : w.edge_paths) mark(path);
        mark(w.source_tail);
        mark(w.sink_tail);
        for (const auto& p : w.spacer_paths) mark(p);
        for (const auto& p : w.added_paths) mark(p);
    } catch (const InputError&) {
        return false;
    }
    if (static_cast<int>(used.size()) != host.edge_count()) return false;
    for (const auto& [id, ends] : pat->edges)
        if (!w.edge_paths.count(id) || w.edge_paths.at(id).empty()) return false;
    return true;
}

}  // namespace ccs
