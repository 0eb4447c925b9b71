#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ccs/game.hpp"
#include "ccs/topology.hpp"

namespace ccs {

struct DeviationWitness {
    std::vector<int> coalition;       // agent indices, ascending
    std::vector<Path> new_strategies; // aligned with coalition
    std::vector<ExtCost> old_costs;
    std::vector<ExtCost> new_costs;
};

struct EquilibriumStats {
    std::uint64_t profiles_scanned = 0;
    std::uint64_t feasible_profiles = 0;
};

struct EquilibriumSets {
    std::vector<StrategyProfile> nash;    // canonical representatives
    std::vector<StrategyProfile> strong;  // subset of nash
    EquilibriumStats stats;
};

inline std::vector<std::vector<Path>> agent_strategies(const Game& game,
                                                       const EnumLimits& limits = {}) {
    std::vector<std::vector<Path>> out(static_cast<std::size_t>(game.agent_count()));
    std::map<std::pair<NodeId, NodeId>, std::vector<Path>> cache;
    for (int i = 0; i < game.agent_count(); ++i) {
        auto tp = game.terminals(i);
        auto key = std::make_pair(tp.source, tp.sink);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, enumerate_paths(game.network(), tp.source, tp.sink, limits))
                     .first;
        out[static_cast<std::size_t>(i)] = it->second;
    }
    return out;
}

namespace detail {

// Scaled-integer cost evaluation. All fair shares p_e / k with k <= n are
// integer multiples of 1/D for D = lcm(cost denominators) * lcm(1..n), so
// profile costs become plain int64 arithmetic inside the search loops.
// Falls back to rationals if the scale would overflow (never at desk scale).
class EvalContext {
public:
    EvalContext(const Game& game, const EnumLimits& limits)
        : game_(game), strategies_(agent_strategies(game, limits)) {
        const Network& net = game.network();
        BigInt denom_lcm = 1;
        for (int e = 0; e < net.edge_count(); ++e)
            denom_lcm = boost::multiprecision::lcm(denom_lcm, denominator(net.edge(e).cost));
        BigInt count_lcm = 1;
        for (int k = 1; k <= game.agent_count(); ++k)
            count_lcm = boost::multiprecision::lcm(count_lcm, BigInt(k));
        BigInt scale = denom_lcm * count_lcm;
        BigInt worst = 0;
        for (int e = 0; e < net.edge_count(); ++e)
            worst += numerator(net.edge(e).cost) * (scale / denominator(net.edge(e).cost));
        fast_ = worst < BigInt(1) << 62;
        if (fast_) {
            scale_ = scale;
            share_.assign(static_cast<std::size_t>(net.edge_count()),
                          std::vector<std::int64_t>(static_cast<std::size_t>(game.agent_count()) + 1, 0));
            for (int e = 0; e < net.edge_count(); ++e) {
                const Rational& p = net.edge(e).cost;
                for (int k = 1; k <= game.agent_count(); ++k) {
                    BigInt v = numerator(p) * (scale / (denominator(p) * k));
                    share_[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)] =
                        v.convert_to<std::int64_t>();
                }
            }
        }
        capacity_.reserve(static_cast<std::size_t>(net.edge_count()));
        for (int e = 0; e < net.edge_count(); ++e) capacity_.push_back(net.edge(e).capacity);
    }

    const Game& game() const { return game_; }
    const std::vector<std::vector<Path>>& strategies() const { return strategies_; }

    bool usage_feasible(const std::vector<int>& usage) const {
        for (std::size_t e = 0; e < capacity_.size(); ++e)
            if (usage[e] > capacity_[e]) return false;
        return true;
    }

    // Cost of one agent's path under the given usage counts; caller
    // guarantees feasibility.
    Rational path_cost(const Path& path, const std::vector<int>& usage) const {
        if (fast_) return Rational(path_cost_scaled(path, usage), scale_);
        Rational total = 0;
        for (const auto& s : path.steps) {
            const Edge& e = game_.network().edge(s.edge);
            total += e.cost / usage[static_cast<std::size_t>(s.edge)];
        }
        return total;
    }

    std::int64_t path_cost_scaled(const Path& path, const std::vector<int>& usage) const {
        std::int64_t total = 0;
        for (const auto& s : path.steps)
            total += share_[static_cast<std::size_t>(s.edge)]
                           [static_cast<std::size_t>(usage[static_cast<std::size_t>(s.edge)])];
        return total;
    }

    bool fast() const { return fast_; }
    const BigInt& scale() const { return scale_; }

private:
    const Game& game_;
    std::vector<std::vector<Path>> strategies_;
    std::vector<int> capacity_;
    bool fast_ = false;
    BigInt scale_ = 1;
    std::vector<std::vector<std::int64_t>> share_;
};

inline void add_usage(std::vector<int>& usage, const Path& p, int delta) {
    for (const auto& s : p.steps) usage[static_cast<std::size_t>(s.edge)] += delta;
}

// Enumerate coalition deviations and hand each candidate to `consider`.
// Returns the first strictly-improving-for-all deviation found.
class DeviationSearch {
public:
    DeviationSearch(const EvalContext& ctx, const StrategyProfile& profile,
                    std::uint64_t budget)
        : ctx_(ctx), profile_(profile), budget_(budget) {
        usage_ = profile.usage(ctx.game().network());
        old_cost_.reserve(profile.paths.size());
        for (const auto& p : profile_.paths) old_cost_.push_back(ctx_.path_cost(p, usage_));
    }

    // Tries every coalition of size 1..max_size and every joint reassignment
    // of its members. Symmetric games collapse agent relabelings: coalitions
    // are count vectors over strategy classes and reassignments are path
    // multisets per class.
    std::optional<DeviationWitness> find(int max_size) {
        const Game& game = ctx_.game();
        int n = game.agent_count();
        if (game.is_symmetric()) {
            std::map<std::string, std::vector<int>> by_class;
            for (int i = 0; i < n; ++i)
                by_class[profile_.paths[static_cast<std::size_t>(i)].key(game.network())]
                    .push_back(i);
            classes_.assign(by_class.size(), {});
            std::size_t c = 0;
            for (auto& [key, members] : by_class) classes_[c++] = std::move(members);
            picked_.assign(classes_.size(), 0);
            return symmetric_class(0, 0, max_size);
        }
        std::vector<int> members;
        return asymmetric_subset(0, members, max_size);
    }

private:
    std::optional<DeviationWitness> symmetric_class(std::size_t cls, int chosen, int max_size) {
        if (cls == classes_.size()) {
            if (chosen == 0) return std::nullopt;
            // Same-class members stay adjacent so the multiset reduction in
            // assign_member applies across each class run.
            std::vector<int> members;
            for (std::size_t c = 0; c < classes_.size(); ++c)
                for (int k = 0; k < picked_[c]; ++k) members.push_back(classes_[c][static_cast<std::size_t>(k)]);
            return try_assignments(members, /*symmetric=*/true);
        }
        int room = max_size - chosen;
        int cap = std::min<int>(room, static_cast<int>(classes_[cls].size()));
        for (int k = 0; k <= cap; ++k) {
            picked_[cls] = k;
            if (auto w = symmetric_class(cls + 1, chosen + k, max_size)) return w;
        }
        picked_[cls] = 0;
        return std::nullopt;
    }

    std::optional<DeviationWitness> asymmetric_subset(int agent, std::vector<int>& members,
                                                      int max_size) {
        if (agent == ctx_.game().agent_count()) {
            if (members.empty()) return std::nullopt;
            return try_assignments(members, /*symmetric=*/false);
        }
        if (auto w = asymmetric_subset(agent + 1, members, max_size)) return w;
        if (static_cast<int>(members.size()) < max_size) {
            members.push_back(agent);
            auto w = asymmetric_subset(agent + 1, members, max_size);
            members.pop_back();
            if (w) return w;
        }
        return std::nullopt;
    }

    // Joint reassignment enumeration for a fixed coalition. In symmetric
    // mode, members with equal current strategies receive nondecreasing path
    // indices, which enumerates each multiset exactly once.
    std::optional<DeviationWitness> try_assignments(const std::vector<int>& members,
                                                    bool symmetric) {
        base_usage_ = usage_;
        for (int m : members) add_usage(base_usage_, profile_.paths[static_cast<std::size_t>(m)], -1);
        assignment_.assign(members.size(), 0);
        return assign_member(members, 0, symmetric);
    }

    std::optional<DeviationWitness> assign_member(const std::vector<int>& members,
                                                  std::size_t pos, bool symmetric) {
        if (pos == members.size()) {
            if (++evaluated_ > budget_)
                throw ResourceError("coalition deviation search exceeded cap of " +
                                    std::to_string(budget_));
            return evaluate(members);
        }
        int agent = members[pos];
        const auto& options = ctx_.strategies()[static_cast<std::size_t>(agent)];
        std::size_t start = 0;
        if (symmetric && pos > 0 &&
            profile_.paths[static_cast<std::size_t>(members[pos - 1])] ==
                profile_.paths[static_cast<std::size_t>(agent)])
            start = assignment_[pos - 1];
        for (std::size_t o = start; o < options.size(); ++o) {
            // Unchanged full assignments are not deviations, but skipping any
            // single member's old path here would be wrong; only the all-equal
            // case is excluded, inside evaluate().
            assignment_[pos] = o;
            add_usage(base_usage_, options[o], +1);
            if (auto w = assign_member(members, pos + 1, symmetric)) return w;
            add_usage(base_usage_, options[o], -1);
        }
        return std::nullopt;
    }

    std::optional<DeviationWitness> evaluate(const std::vector<int>& members) {
        if (!ctx_.usage_feasible(base_usage_)) return std::nullopt;
        bool any_change = false;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto& np =
                ctx_.strategies()[static_cast<std::size_t>(members[i])][assignment_[i]];
            if (!(np == profile_.paths[static_cast<std::size_t>(members[i])])) any_change = true;
        }
        if (!any_change) return std::nullopt;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto& np =
                ctx_.strategies()[static_cast<std::size_t>(members[i])][assignment_[i]];
            if (!(ctx_.path_cost(np, base_usage_) <
                  old_cost_[static_cast<std::size_t>(members[i])]))
                return std::nullopt;
        }
        std::vector<std::size_t> by_index(members.size());
        std::iota(by_index.begin(), by_index.end(), std::size_t{0});
        std::sort(by_index.begin(), by_index.end(),
                  [&](std::size_t a, std::size_t b) { return members[a] < members[b]; });
        DeviationWitness w;
        for (std::size_t i : by_index) {
            const auto& np =
                ctx_.strategies()[static_cast<std::size_t>(members[i])][assignment_[i]];
            w.coalition.push_back(members[i]);
            w.new_strategies.push_back(np);
            w.old_costs.push_back(old_cost_[static_cast<std::size_t>(members[i])]);
            w.new_costs.push_back(ctx_.path_cost(np, base_usage_));
        }
        return w;
    }

    const EvalContext& ctx_;
    const StrategyProfile& profile_;
    std::uint64_t budget_;
    std::uint64_t evaluated_ = 0;
    std::vector<int> usage_;
    std::vector<Rational> old_cost_;
    std::vector<std::vector<int>> classes_;
    std::vector<int> picked_;
    std::vector<int> base_usage_;
    std::vector<std::size_t> assignment_;
};

}  // namespace detail

// Nash check: no agent has a strictly improving unilateral move. Deviations
// into infeasible profiles cost infinity and are never improving.
inline std::optional<DeviationWitness> verify_ne(const Game& game,
                                                 const StrategyProfile& profile,
                                                 const EnumLimits& limits = {}) {
    if (!is_feasible(game, profile))
        throw DomainError("verify_ne expects a feasible profile");
    detail::EvalContext ctx(game, limits);
    detail::DeviationSearch search(ctx, profile, limits.max_profiles * 8);
    return search.find(1);
}

// Strong-equilibrium check: no coalition (up to max_coalition members,
// default all agents) can deviate so that every member strictly gains.
inline std::optional<DeviationWitness> verify_se(const Game& game,
                                                 const StrategyProfile& profile,
                                                 int max_coalition = 0,
                                                 const EnumLimits& limits = {}) {
    if (!is_feasible(game, profile))
        throw DomainError("verify_se expects a feasible profile");
    int bound = max_coalition <= 0 ? game.agent_count()
                                   : std::min(max_coalition, game.agent_count());
    detail::EvalContext ctx(game, limits);
    detail::DeviationSearch search(ctx, profile, limits.max_profiles * 8);
    return search.find(bound);
}

namespace detail {

// Candidate profiles in canonical order: nondecreasing path-index multisets
// for symmetric games, the full index product otherwise.
inline std::vector<std::vector<int>> candidate_profiles(const Game& game,
                                                        const std::vector<std::vector<Path>>& strat,
                                                        const EnumLimits& limits) {
    int n = game.agent_count();
    std::vector<std::vector<int>> out;
    if (game.is_symmetric()) {
        std::size_t paths = strat.front().size();
        if (paths == 0) return out;
        double bound = 1;
        for (int i = 1; i <= n; ++i)
            bound *= static_cast<double>(paths + static_cast<std::size_t>(n) - static_cast<std::size_t>(i)) / i;
        if (bound > static_cast<double>(limits.max_profiles))
            throw ResourceError("profile enumeration exceeds cap of " +
                                std::to_string(limits.max_profiles));
        std::vector<int> pick(static_cast<std::size_t>(n), 0);
        auto rec = [&](auto&& self, int pos, int low) -> void {
            if (pos == n) {
                out.push_back(pick);
                return;
            }
            for (int p = low; p < static_cast<int>(paths); ++p) {
                pick[static_cast<std::size_t>(pos)] = p;
                self(self, pos + 1, p);
            }
        };
        rec(rec, 0, 0);
        return out;
    }
    double bound = 1;
    for (int i = 0; i < n; ++i) {
        bound *= static_cast<double>(strat[static_cast<std::size_t>(i)].size());
        if (bound > static_cast<double>(limits.max_profiles))
            throw ResourceError("profile enumeration exceeds cap of " +
                                std::to_string(limits.max_profiles));
    }
    if (bound == 0) return out;
    std::vector<int> pick(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == n) {
            out.push_back(pick);
            return;
        }
        for (int p = 0; p < static_cast<int>(strat[static_cast<std::size_t>(pos)].size()); ++p) {
            pick[static_cast<std::size_t>(pos)] = p;
            self(self, pos + 1);
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace detail

// Exhaustive NE/SE sets. Symmetric games are enumerated as strategy
// multisets and report one representative per agent-relabeling orbit.
// With limits.jobs > 1 the candidate space is scanned in disjoint chunks;
// the merged result is byte-identical to the single-threaded scan.
inline EquilibriumSets enumerate_equilibria(const Game& game, const EnumLimits& limits = {}) {
    detail::EvalContext ctx(game, limits);
    const auto& strat = ctx.strategies();
    auto candidates = detail::candidate_profiles(game, strat, limits);

    EquilibriumSets result;
    result.stats.profiles_scanned = candidates.size();

    auto make_profile = [&](const std::vector<int>& pick) {
        StrategyProfile p;
        p.paths.reserve(pick.size());
        for (std::size_t i = 0; i < pick.size(); ++i)
            p.paths.push_back(strat[game.is_symmetric() ? 0 : i][static_cast<std::size_t>(pick[i])]);
        return p;
    };

    struct Chunk {
        std::vector<StrategyProfile> nash, strong;
        std::uint64_t feasible = 0;
    };
    int jobs = std::max(1, limits.jobs);
    auto scan = [&](std::size_t begin, std::size_t end) {
        Chunk chunk;
        for (std::size_t i = begin; i < end; ++i) {
            auto profile = make_profile(candidates[i]);
            if (!is_feasible(game, profile)) continue;
            ++chunk.feasible;
            detail::DeviationSearch unilateral(ctx, profile, limits.max_profiles * 8);
            if (unilateral.find(1)) continue;
            chunk.nash.push_back(profile);
            detail::DeviationSearch coalition(ctx, profile, limits.max_profiles * 8);
            if (!coalition.find(game.agent_count())) chunk.strong.push_back(profile);
        }
        return chunk;
    };

    std::vector<Chunk> chunks;
    if (jobs == 1 || candidates.size() < 64) {
        chunks.push_back(scan(0, candidates.size()));
    } else {
        std::vector<std::future<Chunk>> futures;
        std::size_t step = (candidates.size() + static_cast<std::size_t>(jobs) - 1) /
                           static_cast<std::size_t>(jobs);
        for (std::size_t b = 0; b < candidates.size(); b += step)
            futures.push_back(std::async(std::launch::async, scan, b,
                                         std::min(candidates.size(), b + step)));
        for (auto& f : futures) chunks.push_back(f.get());
    }
    for (auto& c : chunks) {
        result.stats.feasible_profiles += c.feasible;
        for (auto& p : c.nash) result.nash.push_back(std::move(p));
        for (auto& p : c.strong) result.strong.push_back(std::move(p));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Constructive strong equilibria.

struct ParallelAssignment {
    struct Group {
        int item;        // caller payload index
        int agents;      // how many agents share the item
        Rational share;  // what each of them pays
    };
    std::vector<Group> groups;  // in assignment (rank) order
};

namespace detail {

struct ParallelItem {
    // Per edge of the collapsed path: its price and how many agents are
    // already pinned to it by forced inner-node segments. A joiner's share
    // of such an edge is p / (take + pinned).
    std::vector<std::pair<Rational, int>> edge_costs;
    int capacity;  // residual capacity after forced segments
    std::string tie_key;

    static ParallelItem plain(Rational cost, int capacity, std::string key) {
        return {{{std::move(cost), 0}}, capacity, std::move(key)};
    }

    Rational share(int take) const {
        Rational total = 0;
        for (const auto& [p, pinned] : edge_costs) total += p / (take + pinned);
        return total;
    }
};

// The greedy fractional-cost assignment for parallel edges: repeatedly give
// the item of minimal per-agent share at take = min(capacity, remaining) to
// that many agents. With no pinned users this is exactly the textbook
// p_e / min(c_e, remaining) rule. Ties break on the canonical id key.
inline ParallelAssignment assign_parallel(const std::vector<ParallelItem>& items, int n) {
    ParallelAssignment out;
    std::vector<char> taken(items.size(), 0);
    int remaining = n;
    while (remaining > 0) {
        int best = -1;
        Rational best_frac;
        int best_take = 0;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (taken[i]) continue;
            int take = std::min(items[i].capacity, remaining);
            if (take <= 0) continue;
            Rational frac = items[i].share(take);
            if (best < 0 || frac < best_frac ||
                (frac == best_frac && items[i].tie_key < items[static_cast<std::size_t>(best)].tie_key)) {
                best = static_cast<int>(i);
                best_frac = frac;
                best_take = take;
            }
        }
        if (best < 0)
            throw DomainError("infeasible game: total capacity smaller than the number of agents");
        taken[static_cast<std::size_t>(best)] = 1;
        out.groups.push_back({best, best_take, best_frac});
        remaining -= best_take;
    }
    return out;
}

}  // namespace detail

struct ParallelEdgesSe {
    StrategyProfile profile;
    std::vector<ParallelAssignment::Group> blocks;  // item = edge index
};

inline ParallelEdgesSe construct_se_parallel_edges(const Game& game) {
    if (!game.is_symmetric())
        throw DomainError("the parallel-edge construction needs a symmetric game");
    const Network& net = game.network();
    for (const auto& e : net.edges()) {
        bool spans = (e.from == net.source() && e.to == net.sink()) ||
                     (!net.directed() && e.from == net.sink() && e.to == net.source());
        if (!spans)
            throw DomainError("network is not a parallel-edge network (edge '" + e.id + "')");
    }
    std::vector<detail::ParallelItem> items;
    for (const auto& e : net.edges())
        items.push_back(detail::ParallelItem::plain(e.cost, e.capacity, e.id));
    auto assignment = detail::assign_parallel(items, game.agent_count());

    ParallelEdgesSe result;
    for (const auto& g : assignment.groups) {
        const Edge& e = net.edge(g.item);
        bool forward = e.from == net.source();
        for (int k = 0; k < g.agents; ++k)
            result.profile.paths.push_back(Path{{{g.item, forward}}});
        result.blocks.push_back(g);
    }
    return result;
}

struct ParallelPathsReduction {
    Network reduced;                                  // a parallel-edge network
    std::map<EdgeId, std::vector<EdgeId>> expansion;  // synthetic edge -> original path
};

// Collapse a parallel-paths network: one synthetic edge per path, carrying
// the path's total cost and its minimal capacity.
inline ParallelPathsReduction reduce_parallel_paths(const Network& net,
                                                    const EnumLimits& limits = {}) {
    auto cls = classify(net, limits);
    if (!cls.is_parallel_paths)
        throw DomainError("network is not a parallel composition of simple paths");
    auto paths = enumerate_paths(net, net.source(), net.sink(), limits);
    std::vector<Edge> edges;
    ParallelPathsReduction out;
    for (const auto& p : paths) {
        Rational cost = 0;
        int cap = 0;
        bool first = true;
        std::vector<EdgeId> ids;
        for (const auto& s : p.steps) {
            const Edge& e = net.edge(s.edge);
            cost += e.cost;
            cap = first ? e.capacity : std::min(cap, e.capacity);
            first = false;
            ids.push_back(e.id);
        }
        std::string synthetic;
        for (std::size_t i = 0; i < ids.size(); ++i) synthetic += (i ? "+" : "") + ids[i];
        edges.push_back({synthetic, "s", "t", cost, cap});
        out.expansion[synthetic] = std::move(ids);
    }
    out.reduced = Network({"s", "t"}, std::move(edges), true, "s", "t");
    return out;
}

namespace detail {

// Where a node sits on an SPP chain.
struct ChainPosition {
    bool junction = false;
    std::size_t junction_index = 0;  // meaningful when junction
    std::size_t block = 0;           // meaningful when inner
    std::size_t path = 0;
    std::size_t offset = 0;          // steps into the block path
};

inline ChainPosition locate_on_chain(const Network& net, const SppChain& chain,
                                     const NodeId& v) {
    for (std::size_t i = 0; i < chain.junctions.size(); ++i)
        if (chain.junctions[i] == v) return {true, i, 0, 0, 0};
    for (std::size_t b = 0; b < chain.blocks.size(); ++b) {
        const auto& block = chain.blocks[b];
        for (std::size_t p = 0; p < block.paths.size(); ++p) {
            NodeId at = block.entry;
            for (std::size_t q = 0; q < block.paths[p].size(); ++q) {
                const auto& step = block.paths[p][q];
                const Edge& e = net.edge(step.edge);
                at = step.forward ? e.to : e.from;
                if (at == v && q + 1 < block.paths[p].size())
                    return {false, 0, b, p, q + 1};
            }
        }
    }
    throw DomainError("node '" + v + "' is not on the source-sink chain");
}

struct AgentSpan {
    std::size_t first_full = 0;  // first block crossed entirely
    std::size_t last_full = 0;   // one past the last block crossed entirely
    std::vector<PathStep> prefix;  // forced segment before the full blocks
    std::vector<PathStep> suffix;  // forced segment after the full blocks
};

inline AgentSpan agent_span(const Network& net, const SppChain& chain, const NodeId& src,
                            const NodeId& dst) {
    auto a = locate_on_chain(net, chain, src);
    auto b = locate_on_chain(net, chain, dst);
    AgentSpan span;

    std::size_t start_block = a.junction ? a.junction_index : a.block + 1;
    std::size_t end_block = b.junction ? b.junction_index : b.block;  // exclusive

    if (!a.junction && !b.junction && a.block == b.block) {
        // Both endpoints inside one block: the unique connecting segment.
        if (a.path != b.path || a.offset >= b.offset)
            throw DomainError("no path between '" + src + "' and '" + dst + "'");
        const auto& steps = chain.blocks[a.block].paths[a.path];
        span.prefix.assign(steps.begin() + static_cast<long>(a.offset),
                           steps.begin() + static_cast<long>(b.offset));
        span.first_full = span.last_full = start_block;
        return span;
    }
    if (start_block > end_block)
        throw DomainError("no path between '" + src + "' and '" + dst + "'");
    if (!a.junction) {
        const auto& steps = chain.blocks[a.block].paths[a.path];
        span.prefix.assign(steps.begin() + static_cast<long>(a.offset), steps.end());
    }
    if (!b.junction) {
        const auto& steps = chain.blocks[b.block].paths[b.path];
        span.suffix.assign(steps.begin(), steps.begin() + static_cast<long>(b.offset));
    }
    span.first_full = start_block;
    span.last_full = end_block;
    return span;
}

// Shared core of the SPP constructions: forced segments for inner-node
// terminals, then per block the greedy parallel assignment over the agents
// that cross it entirely, handed out in the supplied agent order.
inline StrategyProfile build_chain_profile(const Game& game, const SppChain& chain,
                                           const std::vector<int>& order) {
    const Network& net = game.network();
    int n = game.agent_count();
    std::vector<AgentSpan> spans;
    spans.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto tp = game.terminals(i);
        spans.push_back(agent_span(net, chain, tp.source, tp.sink));
    }

    std::vector<int> forced_usage(static_cast<std::size_t>(net.edge_count()), 0);
    for (const auto& sp : spans) {
        for (const auto& s : sp.prefix) ++forced_usage[static_cast<std::size_t>(s.edge)];
        for (const auto& s : sp.suffix) ++forced_usage[static_cast<std::size_t>(s.edge)];
    }

    std::vector<std::vector<PathStep>> middle(static_cast<std::size_t>(n));
    for (std::size_t b = 0; b < chain.blocks.size(); ++b) {
        std::vector<int> crossing;
        for (int i : order)
            if (spans[static_cast<std::size_t>(i)].first_full <= b &&
                b < spans[static_cast<std::size_t>(i)].last_full)
                crossing.push_back(i);
        if (crossing.empty()) continue;

        const auto& block = chain.blocks[b];
        std::vector<ParallelItem> items;
        for (const auto& path : block.paths) {
            ParallelItem item;
            item.capacity = 0;
            bool first = true;
            for (const auto& s : path) {
                const Edge& e = net.edge(s.edge);
                int pinned = forced_usage[static_cast<std::size_t>(s.edge)];
                item.edge_costs.push_back({e.cost, pinned});
                int avail = e.capacity - pinned;
                item.capacity = first ? avail : std::min(item.capacity, avail);
                first = false;
                item.tie_key += e.id + "\x1f";
            }
            items.push_back(std::move(item));
        }
        auto assignment = assign_parallel(items, static_cast<int>(crossing.size()));
        std::size_t next = 0;
        for (const auto& g : assignment.groups) {
            for (int k = 0; k < g.agents; ++k) {
                int agent = crossing[next++];
                const auto& steps = block.paths[static_cast<std::size_t>(g.item)];
                auto& mid = middle[static_cast<std::size_t>(agent)];
                mid.insert(mid.end(), steps.begin(), steps.end());
            }
        }
    }

    StrategyProfile profile;
    profile.paths.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& path = profile.paths[static_cast<std::size_t>(i)].steps;
        const auto& sp = spans[static_cast<std::size_t>(i)];
        path.insert(path.end(), sp.prefix.begin(), sp.prefix.end());
        path.insert(path.end(), middle[static_cast<std::size_t>(i)].begin(),
                    middle[static_cast<std::size_t>(i)].end());
        path.insert(path.end(), sp.suffix.begin(), sp.suffix.end());
    }
    return profile;
}

}  // namespace detail

// Symmetric SPP construction: per block, reduce paths to edges and run the
// greedy assignment; agents are ranked so the j-th agent takes the j-th
// cheapest path of every block.
inline StrategyProfile construct_se_spp(const Game& game, const EnumLimits& limits = {}) {
    if (!game.is_symmetric())
        throw DomainError("construct_se_spp needs a symmetric game");
    if (!classify(game.network(), limits).is_spp)
        throw DomainError("construct_se_spp needs an SPP network");
    auto chain = spp_chain(game.network(), limits);
    std::vector<int> order(static_cast<std::size_t>(game.agent_count()));
    std::iota(order.begin(), order.end(), 0);
    return detail::build_chain_profile(game, chain, order);
}

// Single-source asymmetric construction: agents whose paths span more of the
// chain are served first; inner-node sinks force their unique closing
// segment and rank between the adjacent junction sinks.
inline StrategyProfile construct_se_single_source(const Game& game,
                                                  const EnumLimits& limits = {}) {
    if (!classify(game.network(), limits).is_spp)
        throw DomainError("construct_se_single_source needs an SPP network");
    const NodeId& src = game.terminals(0).source;
    for (int i = 1; i < game.agent_count(); ++i)
        if (game.terminals(i).source != src)
            throw DomainError("construct_se_single_source needs a common source");
    auto chain = spp_chain(game.network(), limits);

    std::vector<int> order(static_cast<std::size_t>(game.agent_count()));
    std::iota(order.begin(), order.end(), 0);
    auto reach = [&](int agent) -> long {
        auto pos = detail::locate_on_chain(game.network(), chain, game.terminals(agent).sink);
        // Junction z closes z blocks (rank 2z); an inner node of block b sits
        // strictly between junction b and junction b+1 (rank 2b+1).
        return pos.junction ? 2 * static_cast<long>(pos.junction_index)
                            : 2 * static_cast<long>(pos.block) + 1;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return reach(a) > reach(b); });
    return detail::build_chain_profile(game, chain, order);
}

// Multi-source construction for chains of parallel-edge blocks with at most
// one genuine parallel-paths block; agents anchored at its inner nodes come
// last.
inline StrategyProfile construct_se_multi_source(const Game& game,
                                                 const EnumLimits& limits = {}) {
    if (!classify(game.network(), limits).is_spp)
        throw DomainError("construct_se_multi_source needs an SPP network");
    auto chain = spp_chain(game.network(), limits);

    std::optional<std::size_t> wide_block;
    for (std::size_t b = 0; b < chain.blocks.size(); ++b) {
        bool edges_only = true;
        for (const auto& p : chain.blocks[b].paths)
            if (p.size() != 1) edges_only = false;
        if (edges_only) continue;
        if (wide_block)
            throw DomainError(
                "multi-source construction allows a single parallel-paths block; "
                "the rest must be parallel edges");
        wide_block = b;
    }

    auto is_inner = [&](const NodeId& v) {
        auto pos = detail::locate_on_chain(game.network(), chain, v);
        return !pos.junction;
    };
    std::vector<int> order(static_cast<std::size_t>(game.agent_count()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        auto anchored = [&](int agent) {
            return is_inner(game.terminals(agent).source) ||
                   is_inner(game.terminals(agent).sink);
        };
        return anchored(a) < anchored(b);
    });
    return detail::build_chain_profile(game, chain, order);
}

}  // namespace ccs
