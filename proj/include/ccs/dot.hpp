#pragma once

#include <sstream>
#include <string>

#include "ccs/game.hpp"
#include "ccs/topology.hpp"

namespace ccs {

// Graphviz export with "cost | capacity" edge labels and stable ordering.
inline std::string network_to_dot(const Network& net) {
    std::ostringstream os;
    os << (net.directed() ? "digraph" : "graph") << " ccs {\n";
    os << "  rankdir=LR;\n";
    for (const auto& v : net.nodes()) {
        os << "  \"" << v << "\"";
        if (v == net.source()) os << " [shape=doublecircle]";
        if (v == net.sink()) os << " [shape=doubleoctagon]";
        os << ";\n";
    }
    const char* arrow = net.directed() ? " -> " : " -- ";
    for (const auto& e : net.edges()) {
        os << "  \"" << e.from << "\"" << arrow << "\"" << e.to << "\" [label=\"" << e.id
           << ": " << to_string(e.cost) << " | " << e.capacity << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

inline std::string tree_to_dot(const DecompositionTree& tree) {
    std::ostringstream os;
    os << "digraph decomposition {\n";
    int counter = 0;
    auto rec = [&](auto&& self, const DecompositionTree& t) -> int {
        int id = counter++;
        switch (t.kind) {
            case DecompositionTree::Kind::Edge:
                os << "  n" << id << " [label=\"" << t.edge << "\", shape=box];\n";
                break;
            case DecompositionTree::Kind::Series:
                os << "  n" << id << " [label=\"series\"];\n";
                break;
            case DecompositionTree::Kind::Parallel:
                os << "  n" << id << " [label=\"parallel\"];\n";
                break;
        }
        for (const auto& c : t.children) {
            int child = self(self, c);
            os << "  n" << id << " -> n" << child << ";\n";
        }
        return id;
    };
    rec(rec, tree);
    os << "}\n";
    return os.str();
}

}  // namespace ccs
