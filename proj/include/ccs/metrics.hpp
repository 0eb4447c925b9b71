#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccs/equilibria.hpp"
#include "ccs/game.hpp"
#include "ccs/optimal.hpp"
#include "ccs/topology.hpp"

namespace ccs {

// An efficiency ratio: a rational, infinite (nonzero equilibrium cost over a
// free optimum), or undefined (the equilibrium set is empty).
struct RatioValue {
    enum class Kind { Finite, Infinite, Undefined };
    Kind kind = Kind::Undefined;
    Rational value;

    static RatioValue finite(Rational v) { return {Kind::Finite, std::move(v)}; }
    static RatioValue infinite() { return {Kind::Infinite, {}}; }
    static RatioValue undefined() { return {Kind::Undefined, {}}; }

    bool is_finite() const { return kind == Kind::Finite; }
    std::string str() const {
        switch (kind) {
            case Kind::Finite: return to_string(value);
            case Kind::Infinite: return "infinite";
            case Kind::Undefined: return "undefined";
        }
        return "?";
    }
};

struct BoundVerdict {
    std::string name;
    bool applicable = false;
    bool pass = false;
    std::string detail;
};

struct MetricsReport {
    Rational opt_cost;
    StrategyProfile opt_profile;
    RatioValue poa, pos, spoa, spos;
    std::optional<StrategyProfile> worst_ne, best_ne, worst_se, best_se;
    TopologyClass topology;
    bool homogeneous_capacities = false;
    EquilibriumStats stats;
    std::vector<BoundVerdict> bounds;
};

namespace detail {

inline RatioValue cost_ratio(const Rational& equilibrium_cost, const Rational& opt_cost) {
    if (opt_cost == 0)
        return equilibrium_cost == 0 ? RatioValue::finite(Rational(1)) : RatioValue::infinite();
    return RatioValue::finite(equilibrium_cost / opt_cost);
}

// True when the whole tree is a series chain of extension-parallel factors
// (a single EP network counts as a chain of length one). SPP networks pass:
// each parallel-paths block is itself EP.
inline bool is_series_of_ep(const DecompositionTree& tree) {
    if (tree.kind == DecompositionTree::Kind::Series) {
        for (const auto& c : tree.children)
            if (!is_ep_tree(c)) return false;
        return true;
    }
    return is_ep_tree(tree);
}

}  // namespace detail

inline std::vector<BoundVerdict> check_bounds(const Game& game, const MetricsReport& report,
                                              const EnumLimits& limits = {}) {
    std::vector<BoundVerdict> out;
    int n = game.agent_count();
    auto decomposition = decompose_sp(game.network(), limits);
    bool ep_chain = decomposition.is_sp() && detail::is_series_of_ep(*decomposition.tree);

    int max_capacity = 0;
    for (const auto& e : game.network().edges())
        max_capacity = std::max(max_capacity, e.capacity);

    {
        BoundVerdict v{"spoa_le_harmonic_n", false, false, ""};
        v.applicable = ep_chain && report.spoa.is_finite();
        if (v.applicable) {
            Rational bound = harmonic(n);
            v.pass = report.spoa.value <= bound;
            v.detail = report.spoa.str() + " <= " + to_string(bound);
        }
        out.push_back(v);
    }
    {
        BoundVerdict v{"spoa_le_n", false, false, ""};
        v.applicable = report.topology.is_sp && report.spoa.is_finite();
        if (v.applicable) {
            v.pass = report.spoa.value <= n;
            v.detail = report.spoa.str() + " <= " + std::to_string(n);
        }
        out.push_back(v);
    }
    {
        BoundVerdict v{"homogeneous_spoa_eq_1", false, false, ""};
        v.applicable = ep_chain && report.homogeneous_capacities && report.spoa.is_finite();
        if (v.applicable) {
            v.pass = report.spoa.value == 1;
            v.detail = report.spoa.str() + " == 1";
        }
        out.push_back(v);
    }
    {
        // Potential chain, scoped to the classes where the coalition-deviation
        // argument applies: cost(worst SE) <= H_{c_max} * opt.
        BoundVerdict v{"se_cost_le_hcmax_opt", false, false, ""};
        v.applicable = ep_chain && report.worst_se.has_value();
        if (v.applicable) {
            Rational lhs = social_cost(game, *report.worst_se).value();
            Rational rhs = harmonic(max_capacity) * report.opt_cost;
            v.pass = lhs <= rhs;
            v.detail = to_string(lhs) + " <= " + to_string(rhs);
        }
        out.push_back(v);
    }
    return out;
}

// Exact PoA/PoS/SPoA/SPoS via exhaustive enumeration plus the exact optimum,
// with witness profiles for every extreme.
inline MetricsReport compute_metrics(const Game& game, const EnumLimits& limits = {}) {
    MetricsReport report;
    auto optimum = solve_optimal(game, limits);
    report.opt_cost = optimum.cost;
    report.opt_profile = optimum.profile;
    try {
        report.topology = classify(game.network(), limits);
    } catch (const InputError&) {
        report.topology = TopologyClass{};  // edges off every path: no flags
    }
    {
        bool homogeneous = true;
        for (const auto& e : game.network().edges())
            if (e.capacity != game.network().edges().front().capacity) homogeneous = false;
        report.homogeneous_capacities = homogeneous;
    }

    auto sets = enumerate_equilibria(game, limits);
    report.stats = sets.stats;

    auto scan = [&](const std::vector<StrategyProfile>& profiles,
                    std::optional<StrategyProfile>& worst, std::optional<StrategyProfile>& best,
                    RatioValue& high, RatioValue& low) {
        if (profiles.empty()) {
            high = RatioValue::undefined();
            low = RatioValue::undefined();
            return;
        }
        std::optional<Rational> worst_cost, best_cost;
        for (const auto& p : profiles) {
            Rational c = social_cost(game, p).value();
            if (!worst_cost || c > *worst_cost) {
                worst_cost = c;
                worst = p;
            }
            if (!best_cost || c < *best_cost) {
                best_cost = c;
                best = p;
            }
        }
        high = detail::cost_ratio(*worst_cost, report.opt_cost);
        low = detail::cost_ratio(*best_cost, report.opt_cost);
    };
    scan(sets.nash, report.worst_ne, report.best_ne, report.poa, report.pos);
    scan(sets.strong, report.worst_se, report.best_se, report.spoa, report.spos);

    // Order sanity: best <= worst within each family, and the strong set is
    // contained in the Nash set.
    auto leq = [](const RatioValue& a, const RatioValue& b) {
        if (a.kind != RatioValue::Kind::Finite || b.kind != RatioValue::Kind::Finite)
            return true;
        return a.value <= b.value;
    };
    if (!leq(report.pos, report.poa) || !leq(report.spos, report.spoa) ||
        !leq(report.pos, report.spos))
        throw DomainError("ratio ordering violated (enumeration bug)");

    report.bounds = check_bounds(game, report, limits);
    return report;
}

}  // namespace ccs
