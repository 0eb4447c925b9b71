#include <gtest/gtest.h>

#include "ccs/equilibria.hpp"
#include "ccs/instances.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ccs;

namespace {

Path path_of(const Network& net, std::initializer_list<const char*> ids) {
    Path p;
    for (const char* id : ids) p.steps.push_back({net.edge_index(id), true});
    return p;
}

TEST(VerifyNe, Fig1UniqueNeHolds) {
    Game game = build_fig1().game;
    const Network& net = game.network();
    StrategyProfile ne{{path_of(net, {"a"}), path_of(net, {"b", "c"})}};
    EXPECT_FALSE(verify_ne(game, ne).has_value());
}

TEST(VerifyNe, SharedStemProfileBreaks) {
    Game game = build_fig1().game;
    const Network& net = game.network();
    StrategyProfile shared{{path_of(net, {"b", "c"}), path_of(net, {"b", "d"})}};
    auto w = verify_ne(game, shared);
    ASSERT_TRUE(w.has_value());
    ASSERT_EQ(w->coalition.size(), 1u);
    EXPECT_EQ(w->coalition[0], 1);
    EXPECT_EQ(w->new_strategies[0].edge_ids(net), std::vector<EdgeId>{"a"});
    EXPECT_EQ(w->old_costs[0].value(), Rational(11, 10));
    EXPECT_EQ(w->new_costs[0].value(), Rational(1));
}

TEST(VerifyNe, AllFreeProfileIsStable) {
    Network net({"s", "t"},
                {{"e", "s", "t", Rational(0), 2}, {"f", "s", "t", Rational(3), 2}}, true, "s",
                "t");
    Game game = Game::symmetric(net, 2);
    StrategyProfile free_only{{path_of(net, {"e"}), path_of(net, {"e"})}};
    EXPECT_FALSE(verify_ne(game, free_only).has_value());
}

TEST(VerifyNe, InfeasibleInputRejected) {
    Game game = build_fig1().game;
    const Network& net = game.network();
    StrategyProfile crowded{{path_of(net, {"a"}), path_of(net, {"a"})}};
    EXPECT_THROW(verify_ne(game, crowded), DomainError);
    EXPECT_THROW(verify_se(game, crowded), DomainError);
}

TEST(VerifySe, Fig1CoalitionWitness) {
    Game game = build_fig1().game;
    const Network& net = game.network();
    StrategyProfile ne{{path_of(net, {"a"}), path_of(net, {"b", "c"})}};
    auto w = verify_se(game, ne);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->coalition, (std::vector<int>{0, 1}));
    std::multiset<Rational> new_costs{w->new_costs[0].value(), w->new_costs[1].value()};
    EXPECT_EQ(new_costs, (std::multiset<Rational>{Rational(7, 10), Rational(11, 10)}));
}

TEST(VerifySe, SharedCheapestPathIsStrong) {
    // Uncapacitated-style: everyone fits on the cheapest path.
    Network net({"s", "t"},
                {{"e", "s", "t", Rational(1), 4}, {"f", "s", "t", Rational(5), 4}}, true, "s",
                "t");
    Game game = Game::symmetric(net, 3);
    StrategyProfile all{{path_of(net, {"e"}), path_of(net, {"e"}), path_of(net, {"e"})}};
    EXPECT_FALSE(verify_se(game, all).has_value());
}

TEST(VerifySe, Fig4UnitEdgeProfileIsStrong) {
    Game game = build_fig4_sp_spoa(3, Rational(1, 10)).game;
    const Network& net = game.network();
    StrategyProfile se{{path_of(net, {"u0", "z1", "z2"}), path_of(net, {"z0", "u1", "z2"}),
                        path_of(net, {"z0", "z1", "u2"})}};
    ASSERT_TRUE(is_feasible(game, se));
    EXPECT_FALSE(verify_se(game, se).has_value());
    EXPECT_EQ(social_cost(game, se).value(), Rational(3));
}

TEST(VerifySe, MonotoneInCoalitionBound) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomGameSpec spec;
        spec.cls = NetworkClass::Ep;
        spec.agents = 3;
        spec.max_edges = 6;
        spec.seed = seed;
        Game game = random_game(spec);
        for (const auto& profile : oracle::all_profiles(game)) {
            if (!is_feasible(game, profile)) continue;
            bool clean_full = !verify_se(game, profile).has_value();
            if (clean_full)
                for (int bound = 1; bound <= game.agent_count(); ++bound)
                    EXPECT_FALSE(verify_se(game, profile, bound).has_value());
        }
    }
}

TEST(VerifySe, AgreesWithBruteForceOracle) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        RandomGameSpec spec;
        spec.cls = seed % 3 == 0 ? NetworkClass::General : NetworkClass::Sp;
        spec.agents = 3;
        spec.max_edges = 6;
        spec.seed = seed + 500;
        Game game = random_game(spec);
        for (const auto& profile : oracle::all_profiles(game)) {
            if (!is_feasible(game, profile)) continue;
            EXPECT_EQ(!verify_ne(game, profile).has_value(), oracle::is_ne(game, profile));
            EXPECT_EQ(!verify_se(game, profile).has_value(), oracle::is_se(game, profile));
        }
    }
}

TEST(Enumerate, Fig1SetsMatchPaper) {
    Game game = build_fig1().game;
    auto sets = enumerate_equilibria(game);
    ASSERT_EQ(sets.nash.size(), 1u);
    EXPECT_TRUE(sets.strong.empty());
    std::multiset<Rational> costs{agent_cost(game, sets.nash[0], 0).value(),
                                  agent_cost(game, sets.nash[0], 1).value()};
    EXPECT_EQ(costs, (std::multiset<Rational>{Rational(1), Rational(13, 10)}));
}

TEST(Enumerate, SingleAgentSingleEdge) {
    Network net({"s", "t"}, {{"e", "s", "t", Rational(2), 1}}, true, "s", "t");
    Game game = Game::symmetric(net, 1);
    auto sets = enumerate_equilibria(game);
    ASSERT_EQ(sets.nash.size(), 1u);
    ASSERT_EQ(sets.strong.size(), 1u);
    EXPECT_EQ(sets.strong[0].paths[0].edge_ids(net), std::vector<EdgeId>{"e"});
}

TEST(Enumerate, MatchesOracleOnRandomGames) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomGameSpec spec;
        spec.cls = seed % 2 ? NetworkClass::Ep : NetworkClass::General;
        spec.agents = 3;
        spec.max_edges = 6;
        spec.seed = seed + 900;
        Game game = random_game(spec);
        auto sets = enumerate_equilibria(game);
        auto reference = oracle::equilibria(game);
        std::set<std::string> ne_keys, se_keys;
        for (const auto& p : sets.nash) ne_keys.insert(oracle::profile_orbit_key(game, p));
        for (const auto& p : sets.strong) se_keys.insert(oracle::profile_orbit_key(game, p));
        EXPECT_EQ(ne_keys, reference.ne_orbits);
        EXPECT_EQ(se_keys, reference.se_orbits);
    }
}

TEST(Enumerate, StrongSubsetOfNashAndStatsFilled) {
    Game game = build_fig2_braess().game;
    auto sets = enumerate_equilibria(game);
    std::set<std::string> ne_keys;
    for (const auto& p : sets.nash) ne_keys.insert(oracle::profile_orbit_key(game, p));
    for (const auto& p : sets.strong)
        EXPECT_TRUE(ne_keys.count(oracle::profile_orbit_key(game, p)));
    EXPECT_GT(sets.stats.profiles_scanned, 0u);
    EXPECT_GT(sets.stats.feasible_profiles, 0u);
}

TEST(Enumerate, JobsDoNotChangeResults) {
    Game game = build_fig6_sp_spos(4, Rational(1, 10)).game;
    EnumLimits serial;
    EnumLimits parallel;
    parallel.jobs = 4;
    auto a = enumerate_equilibria(game, serial);
    auto b = enumerate_equilibria(game, parallel);
    ASSERT_EQ(a.nash.size(), b.nash.size());
    ASSERT_EQ(a.strong.size(), b.strong.size());
    for (std::size_t i = 0; i < a.nash.size(); ++i)
        EXPECT_EQ(oracle::profile_orbit_key(game, a.nash[i]),
                  oracle::profile_orbit_key(game, b.nash[i]));
}

TEST(Enumerate, CapRaisesResourceError) {
    Game game = build_fig6_sp_spos(4, Rational(1, 10)).game;
    EnumLimits tiny;
    tiny.max_profiles = 10;
    EXPECT_THROW(enumerate_equilibria(game, tiny), ResourceError);
}

// --- Algorithm 1 ------------------------------------------------------------

TEST(ParallelEdges, GreedySharesTheCheapFraction) {
    Network net({"s", "t"},
                {{"e1", "s", "t", Rational(1), 1}, {"e2", "s", "t", Rational(6, 5), 2}}, true,
                "s", "t");
    Game game = Game::symmetric(net, 2);
    auto result = construct_se_parallel_edges(game);
    ASSERT_EQ(result.blocks.size(), 1u);
    EXPECT_EQ(net.edge(result.blocks[0].item).id, "e2");
    EXPECT_EQ(result.blocks[0].agents, 2);
    EXPECT_EQ(result.blocks[0].share, Rational(3, 5));
    EXPECT_FALSE(verify_se(game, result.profile).has_value());
}

TEST(ParallelEdges, FreeEdgeTakesEveryone) {
    Network net({"s", "t"}, {{"e", "s", "t", Rational(0), 5}}, true, "s", "t");
    Game game = Game::symmetric(net, 5);
    auto result = construct_se_parallel_edges(game);
    EXPECT_EQ(result.blocks.size(), 1u);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(agent_cost(game, result.profile, i).value(), Rational(0));
}

TEST(ParallelEdges, SymmetricUnitEdgesSplitOnePerEdge) {
    Network net({"s", "t"},
                {{"e1", "s", "t", Rational(1), 1},
                 {"e2", "s", "t", Rational(1), 1},
                 {"e3", "s", "t", Rational(1), 1}},
                true, "s", "t");
    Game game = Game::symmetric(net, 3);
    auto result = construct_se_parallel_edges(game);
    EXPECT_EQ(result.blocks.size(), 3u);
    for (const auto& b : result.blocks) {
        EXPECT_EQ(b.agents, 1);
        EXPECT_EQ(b.share, Rational(1));
    }
}

TEST(ParallelEdges, InfeasibleGameRejected) {
    Network net({"s", "t"}, {{"e", "s", "t", Rational(1), 1}}, true, "s", "t");
    Game game = Game::symmetric(net, 2);
    EXPECT_THROW(construct_se_parallel_edges(game), DomainError);
}

TEST(ParallelEdges, NotParallelNetworkRejected) {
    Game game = build_fig1().game;
    EXPECT_THROW(construct_se_parallel_edges(game), DomainError);
}

TEST(ParallelEdges, SoundAndBestForFirstAgentOnRandomGames) {
    int verified = 0;
    for (std::uint64_t seed = 1; verified < 40 && seed <= 120; ++seed) {
        RandomGameSpec spec;
        spec.cls = NetworkClass::ParallelEdges;
        spec.agents = 2 + static_cast<int>(seed % 3);
        spec.max_edges = 5;
        spec.seed = seed + 2000;
        Game game = random_game(spec);
        auto result = construct_se_parallel_edges(game);
        ASSERT_FALSE(verify_se(game, result.profile).has_value());
        Rational first_agent = agent_cost(game, result.profile, 0).value();
        auto oracle_best = oracle::best_se_cost_for_first_agent(game);
        ASSERT_TRUE(oracle_best.has_value());
        EXPECT_EQ(first_agent, *oracle_best);
        ++verified;
    }
    EXPECT_GE(verified, 40);
}

// --- Parallel-path reduction -------------------------------------------------

TEST(ReduceParallelPaths, ChainBecomesOneEdge) {
    Network chain({"s", "m", "t"},
                  {{"a", "s", "m", Rational(1, 2), 3}, {"b", "m", "t", Rational(1, 2), 2}},
                  true, "s", "t");
    auto red = reduce_parallel_paths(chain);
    ASSERT_EQ(red.reduced.edge_count(), 1);
    EXPECT_EQ(red.reduced.edge(0).cost, Rational(1));
    EXPECT_EQ(red.reduced.edge(0).capacity, 2);
    EXPECT_EQ(red.expansion.at(red.reduced.edge(0).id), (std::vector<EdgeId>{"a", "b"}));
}

TEST(ReduceParallelPaths, SingleEdgeIsItself) {
    Network net({"s", "t"}, {{"e", "s", "t", Rational(7), 4}}, true, "s", "t");
    auto red = reduce_parallel_paths(net);
    EXPECT_EQ(red.reduced.edge_count(), 1);
    EXPECT_EQ(red.reduced.edge(0).cost, Rational(7));
}

TEST(ReduceParallelPaths, SharedStemRejected) {
    EXPECT_THROW(reduce_parallel_paths(build_fig1().game.network()), DomainError);
}

// --- SPP construction ---------------------------------------------------------

TEST(ConstructSpp, DegenerateChainMatchesParallelEdges) {
    Network net({"s", "t"},
                {{"e1", "s", "t", Rational(1), 1}, {"e2", "s", "t", Rational(6, 5), 2}}, true,
                "s", "t");
    Game game = Game::symmetric(net, 2);
    auto direct = construct_se_parallel_edges(game);
    auto via_spp = construct_se_spp(game);
    EXPECT_EQ(oracle::profile_orbit_key(game, direct.profile),
              oracle::profile_orbit_key(game, via_spp));
}

TEST(ConstructSpp, TwoBlocksShareTheCheapFractionPerBlock) {
    Network b1({"s", "t"},
               {{"a1", "s", "t", Rational(1), 1}, {"a2", "s", "t", Rational(6, 5), 2}}, true,
               "s", "t");
    Network b2({"s", "t"},
               {{"c1", "s", "t", Rational(1), 1}, {"c2", "s", "t", Rational(6, 5), 2}}, true,
               "s", "t");
    Game game = Game::symmetric(compose_series({b1, b2}), 2);
    auto profile = construct_se_spp(game);
    for (int i = 0; i < 2; ++i)
        EXPECT_EQ(agent_cost(game, profile, i).value(), Rational(6, 5));
    EXPECT_FALSE(verify_se(game, profile).has_value());
}

TEST(ConstructSpp, GreedyPicksZeroCostCapOneFirst) {
    // Block 1 holds (0,1) and (10,2); the greedy takes the free edge for one
    // agent, then the 10-edge alone for the other: ranks pay 0 and 10.
    Network b1({"s", "t"},
               {{"a1", "s", "t", Rational(0), 1}, {"a2", "s", "t", Rational(10), 2}}, true,
               "s", "t");
    Network b2({"s", "t"}, {{"c1", "s", "t", Rational(0), 2}}, true, "s", "t");
    Game game = Game::symmetric(compose_series({b1, b2}), 2);
    auto profile = construct_se_spp(game);
    std::multiset<Rational> costs{agent_cost(game, profile, 0).value(),
                                  agent_cost(game, profile, 1).value()};
    EXPECT_EQ(costs, (std::multiset<Rational>{Rational(0), Rational(10)}));
    EXPECT_FALSE(verify_se(game, profile).has_value());
    EXPECT_TRUE(oracle::is_se(game, profile));
}

TEST(ConstructSpp, SoundOnRandomSppGames) {
    int verified = 0;
    for (std::uint64_t seed = 1; verified < 30 && seed <= 90; ++seed) {
        RandomGameSpec spec;
        spec.cls = NetworkClass::Spp;
        spec.agents = 2 + static_cast<int>(seed % 3);
        spec.max_edges = 8;
        spec.seed = seed + 3000;
        Game game = random_game(spec);
        StrategyProfile profile;
        try {
            profile = construct_se_spp(game);
        } catch (const DomainError&) {
            continue;  // infeasible draw
        }
        ASSERT_TRUE(is_feasible(game, profile));
        ASSERT_FALSE(verify_se(game, profile).has_value()) << "seed " << seed;
        ++verified;
    }
    EXPECT_GE(verified, 30);
}

TEST(ConstructSpp, RejectsNonSppNetworks) {
    EXPECT_THROW(construct_se_spp(build_fig1().game), DomainError);
}

// --- Asymmetric constructions --------------------------------------------------

TEST(SingleSource, AllSinksEqualMatchesSymmetric) {
    Network b1({"s", "t"},
               {{"a1", "s", "t", Rational(1), 2}, {"a2", "s", "t", Rational(3), 2}}, true,
               "s", "t");
    Network b2({"s", "t"},
               {{"c1", "s", "t", Rational(2), 3}, {"c2", "s", "t", Rational(0), 1}}, true,
               "s", "t");
    Network net = compose_series({b1, b2});
    Game sym = Game::symmetric(net, 3);
    Game asym = Game::asymmetric(net, {{net.source(), net.sink()},
                                       {net.source(), net.sink()},
                                       {net.source(), net.sink()}});
    auto a = construct_se_spp(sym);
    auto b = construct_se_single_source(asym);
    EXPECT_EQ(oracle::profile_orbit_key(sym, a), oracle::profile_orbit_key(sym, b));
}

TEST(SingleSource, MidChainSinkGetsPrefixOnly) {
    Network b1({"s", "t"},
               {{"a1", "s", "t", Rational(1), 2}, {"a2", "s", "t", Rational(3), 2}}, true,
               "s", "t");
    Network b2({"s", "t"},
               {{"c1", "s", "t", Rational(2), 3}, {"c2", "s", "t", Rational(0), 1}}, true,
               "s", "t");
    Network net = compose_series({b1, b2});
    // Junction between the blocks is "j1".
    Game game = Game::asymmetric(net, {{net.source(), net.sink()}, {net.source(), "j1"}});
    auto profile = construct_se_single_source(game);
    ASSERT_TRUE(is_feasible(game, profile));
    EXPECT_FALSE(verify_se(game, profile).has_value());
    // Agent 2 stops at the junction: one block only.
    EXPECT_EQ(profile.paths[1].steps.size(), 1u);
}

TEST(SingleSource, InnerNodeSinkForcesItsSegment) {
    // Second block has a two-edge path through node "m".
    Network b1({"s", "t"},
               {{"a1", "s", "t", Rational(1), 2}, {"a2", "s", "t", Rational(2), 2}}, true,
               "s", "t");
    Network b2({"s", "m", "t"},
               {{"p1", "s", "m", Rational(1), 2},
                {"p2", "m", "t", Rational(1), 2},
                {"q", "s", "t", Rational(0), 1}},
               true, "s", "t");
    Network net = compose_series({b1, b2});
    Game game = Game::asymmetric(net, {{net.source(), net.sink()}, {net.source(), "m"}});
    auto profile = construct_se_single_source(game);
    ASSERT_TRUE(is_feasible(game, profile));
    EXPECT_FALSE(verify_se(game, profile).has_value());
    EXPECT_EQ(profile.paths[1].edge_ids(net).back(), "p1");
}

TEST(SingleSource, SoundOnRandomInstances) {
    int verified = 0;
    for (std::uint64_t seed = 1; verified < 25 && seed <= 200; ++seed) {
        auto game = testutil::random_single_source_game(seed, 2 + static_cast<int>(seed % 2));
        if (!game) continue;
        StrategyProfile profile;
        try {
            profile = construct_se_single_source(*game);
        } catch (const DomainError&) {
            continue;
        }
        ASSERT_TRUE(is_feasible(*game, profile)) << "seed " << seed;
        ASSERT_FALSE(verify_se(*game, profile).has_value()) << "seed " << seed;
        ++verified;
    }
    EXPECT_GE(verified, 25);
}

TEST(MultiSource, SymmetricAgentsMatchSppConstruction) {
    Network b1({"s", "t"},
               {{"a1", "s", "t", Rational(1), 2}, {"a2", "s", "t", Rational(3), 2}}, true,
               "s", "t");
    Network b2({"s", "m", "t"},
               {{"p1", "s", "m", Rational(1), 2},
                {"p2", "m", "t", Rational(1), 2},
                {"q", "s", "t", Rational(0), 1}},
               true, "s", "t");
    Network net = compose_series({b1, b2});
    Game sym = Game::symmetric(net, 2);
    Game asym =
        Game::asymmetric(net, {{net.source(), net.sink()}, {net.source(), net.sink()}});
    auto a = construct_se_spp(sym);
    auto b = construct_se_multi_source(asym);
    EXPECT_EQ(oracle::profile_orbit_key(sym, a), oracle::profile_orbit_key(sym, b));
}

TEST(MultiSource, InnerSourceForcedAndSound) {
    Network b1({"s", "t"},
               {{"a1", "s", "t", Rational(1), 2}, {"a2", "s", "t", Rational(3), 2}}, true,
               "s", "t");
    Network b2({"s", "m", "t"},
               {{"p1", "s", "m", Rational(1), 2},
                {"p2", "m", "t", Rational(1), 2},
                {"q", "s", "t", Rational(0), 1}},
               true, "s", "t");
    Network net = compose_series({b1, b2});
    Game game = Game::asymmetric(net, {{net.source(), net.sink()}, {"m", net.sink()}});
    auto profile = construct_se_multi_source(game);
    ASSERT_TRUE(is_feasible(game, profile));
    EXPECT_FALSE(verify_se(game, profile).has_value());
    EXPECT_EQ(profile.paths[1].edge_ids(net), std::vector<EdgeId>{"p2"});
}

TEST(MultiSource, TwoWideBlocksRejected) {
    Network wide({"s", "m", "t"},
                 {{"p1", "s", "m", Rational(1), 2},
                  {"p2", "m", "t", Rational(1), 2},
                  {"q", "s", "t", Rational(0), 1}},
                 true, "s", "t");
    Network net = compose_series({wide, wide});
    Game game = Game::asymmetric(net, {{net.source(), net.sink()}});
    EXPECT_THROW(construct_se_multi_source(game), DomainError);
}

TEST(MultiSource, SoundOnRandomInstances) {
    int verified = 0;
    for (std::uint64_t seed = 1; verified < 25 && seed <= 300; ++seed) {
        auto game = testutil::random_multi_source_game(seed, 2 + static_cast<int>(seed % 2));
        if (!game) continue;
        StrategyProfile profile;
        try {
            profile = construct_se_multi_source(*game);
        } catch (const DomainError&) {
            continue;
        }
        ASSERT_TRUE(is_feasible(*game, profile)) << "seed " << seed;
        ASSERT_FALSE(verify_se(*game, profile).has_value()) << "seed " << seed;
        ++verified;
    }
    EXPECT_GE(verified, 25);
}

// --- Undirected twins -----------------------------------------------------------

TEST(Undirected, StrongEquilibriaMapIntoDirectedOnes) {
    int compared = 0;
    for (std::uint64_t seed = 1; compared < 15 && seed <= 60; ++seed) {
        RandomGameSpec spec;
        spec.cls = NetworkClass::Sp;
        spec.agents = 2;
        spec.max_edges = 6;
        spec.seed = seed + 4200;
        Game directed = random_game(spec);
        Game undirected =
            Game::symmetric(testutil::undirected_twin(directed.network()), 2);
        auto d = enumerate_equilibria(directed);
        auto u = enumerate_equilibria(undirected);
        std::set<std::string> directed_se;
        for (const auto& p : d.strong)
            directed_se.insert(oracle::profile_orbit_key(directed, p));
        for (const auto& p : u.strong) {
            for (const auto& path : p.paths)
                for (const auto& s : path.steps) ASSERT_TRUE(s.forward);
            EXPECT_TRUE(directed_se.count(oracle::profile_orbit_key(directed, p)));
            Rational cu = social_cost(undirected, p).value();
            Rational cd = social_cost(directed, p).value();
            EXPECT_EQ(cu, cd);
        }
        ++compared;
    }
    EXPECT_GE(compared, 15);
}

}  // namespace
