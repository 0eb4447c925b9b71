#include <gtest/gtest.h>

#include "ccs/game.hpp"
#include "ccs/instances.hpp"
#include "ccs/json_io.hpp"
#include "oracles.hpp"

using namespace ccs;

namespace {

Network fig1_network() { return build_fig1().game.network(); }

Path path_of(const Network& net, std::initializer_list<const char*> ids) {
    Path p;
    for (const char* id : ids) p.steps.push_back({net.edge_index(id), true});
    return p;
}

TEST(Rational, ParseAndPrint) {
    EXPECT_EQ(parse_rational("13/10"), Rational(13, 10));
    EXPECT_EQ(parse_rational("-3/6"), Rational(-1, 2));
    EXPECT_EQ(parse_rational("7"), Rational(7));
    EXPECT_EQ(to_string(Rational(26, 20)), "13/10");
    EXPECT_EQ(to_string(Rational(4, 2)), "2");
    EXPECT_THROW(parse_rational("0.7"), InputError);
    EXPECT_THROW(parse_rational("1/0"), InputError);
    EXPECT_THROW(parse_rational("x"), InputError);
}

TEST(Rational, ExtCostOrdering) {
    ExtCost inf = ExtCost::infinity();
    ExtCost one{Rational(1)};
    EXPECT_TRUE(one < inf);
    EXPECT_FALSE(inf < one);
    EXPECT_FALSE(inf < inf);
    EXPECT_TRUE(inf == inf);
    EXPECT_TRUE(inf >= one);
    EXPECT_EQ((one + inf).str(), "infinity");
}

TEST(Rational, HarmonicMatchesIndependentRoute) {
    EXPECT_EQ(harmonic(0), Rational(0));
    EXPECT_EQ(harmonic(2), Rational(3, 2));
    for (int k = 0; k <= 9; ++k) EXPECT_EQ(harmonic(k), oracle::harmonic(k));
}

TEST(Network, ValidationErrors) {
    EXPECT_THROW(Network({"s"}, {}, true, "s", "s"), InputError);
    EXPECT_THROW(Network({"s", "t"}, {{"e", "s", "x", Rational(1), 1}}, true, "s", "t"),
                 InputError);
    EXPECT_THROW(Network({"s", "t"},
                         {{"e", "s", "t", Rational(1), 1}, {"e", "s", "t", Rational(1), 1}},
                         true, "s", "t"),
                 InputError);
    EXPECT_THROW(Network({"s", "t"}, {{"e", "s", "t", Rational(-1), 1}}, true, "s", "t"),
                 InputError);
}

TEST(EnumeratePaths, SingleAndParallelEdges) {
    Network one({"s", "t"}, {{"e1", "s", "t", Rational(1), 1}}, true, "s", "t");
    auto paths = enumerate_paths(one, "s", "t");
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(paths[0].edge_ids(one), std::vector<EdgeId>{"e1"});

    Network two({"s", "t"},
                {{"e1", "s", "t", Rational(1), 1}, {"e2", "s", "t", Rational(2), 1}}, true,
                "s", "t");
    EXPECT_EQ(enumerate_paths(two, "s", "t").size(), 2u);
}

TEST(EnumeratePaths, Fig1HasThreePathsInCanonicalOrder) {
    Network net = fig1_network();
    auto paths = enumerate_paths(net, "s", "t");
    ASSERT_EQ(paths.size(), 3u);
    EXPECT_EQ(paths[0].edge_ids(net), (std::vector<EdgeId>{"a"}));
    EXPECT_EQ(paths[1].edge_ids(net), (std::vector<EdgeId>{"b", "c"}));
    EXPECT_EQ(paths[2].edge_ids(net), (std::vector<EdgeId>{"b", "d"}));
}

TEST(EnumeratePaths, UnknownNodeRejected) {
    Network net = fig1_network();
    EXPECT_THROW(enumerate_paths(net, "s", "zz"), InputError);
}

TEST(EnumeratePaths, CapacityZeroEdgesStillEnumerated) {
    Network net({"s", "t"},
                {{"e1", "s", "t", Rational(1), 0}, {"e2", "s", "t", Rational(1), 1}}, true,
                "s", "t");
    EXPECT_EQ(enumerate_paths(net, "s", "t").size(), 2u);
}

TEST(EnumeratePaths, UndirectedUsesBothDirectionsAndStaysSimple) {
    Network net({"s", "v", "t"},
                {{"a", "s", "v", Rational(1), 1},
                 {"b", "t", "v", Rational(1), 1},  // only usable backwards
                 {"c", "s", "t", Rational(1), 1}},
                false, "s", "t");
    auto paths = enumerate_paths(net, "s", "t");
    ASSERT_EQ(paths.size(), 2u);
    std::vector<char> simple;
    for (const auto& p : paths) {
        std::set<NodeId> nodes;
        NodeId at = "s";
        nodes.insert(at);
        for (const auto& s : p.steps) {
            const Edge& e = net.edge(s.edge);
            at = s.forward ? e.to : e.from;
            EXPECT_TRUE(nodes.insert(at).second);
        }
        EXPECT_EQ(at, "t");
        simple.push_back(1);
    }
}

TEST(Feasibility, CapacityCounting) {
    Network net({"s", "t"}, {{"e", "s", "t", Rational(1), 2}}, true, "s", "t");
    Game two_on_two = Game::symmetric(net, 2);
    StrategyProfile both{{path_of(net, {"e"}), path_of(net, {"e"})}};
    EXPECT_TRUE(is_feasible(two_on_two, both));

    Network tight({"s", "t"}, {{"e", "s", "t", Rational(1), 1}}, true, "s", "t");
    Game two_on_one = Game::symmetric(tight, 2);
    StrategyProfile crowded{{path_of(tight, {"e"}), path_of(tight, {"e"})}};
    EXPECT_FALSE(is_feasible(two_on_one, crowded));
}

TEST(AgentCost, SoloPathAndSharing) {
    // One agent on edges costing 6/5 and 1/10 pays 13/10.
    Network net = fig1_network();
    Game game = Game::symmetric(net, 2);
    StrategyProfile profile{{path_of(net, {"a"}), path_of(net, {"b", "c"})}};
    EXPECT_EQ(agent_cost(game, profile, 1).value(), Rational(13, 10));
    EXPECT_EQ(agent_cost(game, profile, 0).value(), Rational(1));

    // Shared stem: 6/10 + 1/10 and 6/10 + 1/2.
    StrategyProfile shared{{path_of(net, {"b", "c"}), path_of(net, {"b", "d"})}};
    EXPECT_EQ(agent_cost(game, shared, 0).value(), Rational(7, 10));
    EXPECT_EQ(agent_cost(game, shared, 1).value(), Rational(11, 10));
}

TEST(AgentCost, InfeasibleProfileIsInfinite) {
    Network net = fig1_network();
    Game game = Game::symmetric(net, 2);
    StrategyProfile crowded{{path_of(net, {"a"}), path_of(net, {"a"})}};
    EXPECT_TRUE(agent_cost(game, crowded, 0).is_infinite());
    EXPECT_TRUE(social_cost(game, crowded).is_infinite());
}

TEST(SocialCost, EqualsUsedEdgeTotal) {
    Network net = fig1_network();
    Game game = Game::symmetric(net, 2);
    StrategyProfile ne{{path_of(net, {"a"}), path_of(net, {"b", "c"})}};
    EXPECT_EQ(social_cost(game, ne).value(), Rational(23, 10));
}

TEST(SocialCost, FreeEdgesCostNothing) {
    Network net({"s", "t"},
                {{"e", "s", "t", Rational(0), 2}, {"f", "s", "t", Rational(9), 1}}, true, "s",
                "t");
    Game game = Game::symmetric(net, 2);
    StrategyProfile free_only{{path_of(net, {"e"}), path_of(net, {"e"})}};
    EXPECT_EQ(social_cost(game, free_only).value(), Rational(0));
}

TEST(Potential, HandComputedValues) {
    Network net({"s", "t"}, {{"e", "s", "t", Rational(1), 2}}, true, "s", "t");
    Game game = Game::symmetric(net, 2);
    StrategyProfile both{{path_of(net, {"e"}), path_of(net, {"e"})}};
    EXPECT_EQ(potential(game, both), Rational(3, 2));

    Network pair({"s", "v", "t"},
                 {{"b", "s", "v", Rational(6, 5), 2}, {"c", "v", "t", Rational(1, 10), 2},
                  {"d", "v", "t", Rational(1, 2), 1}},
                 true, "s", "t");
    Game g2 = Game::symmetric(pair, 2);
    StrategyProfile p{{path_of(pair, {"b", "c"}), path_of(pair, {"b", "d"})}};
    // 6/5 * H_2 + 1/10 + 1/2 = 9/5 + 3/5 = 12/5; with d excluded: 19/10.
    StrategyProfile q{{path_of(pair, {"b", "c"}), path_of(pair, {"b", "c"})}};
    EXPECT_EQ(potential(game, both), Rational(3, 2));
    EXPECT_EQ(potential(g2, q), Rational(6, 5) * oracle::harmonic(2) +
                                    Rational(1, 10) * oracle::harmonic(2));
    EXPECT_EQ(potential(g2, p),
              Rational(6, 5) * oracle::harmonic(2) + Rational(1, 10) + Rational(1, 2));
}

TEST(Potential, InfeasibleProfileRejected) {
    Network net({"s", "t"}, {{"e", "s", "t", Rational(1), 1}}, true, "s", "t");
    Game game = Game::symmetric(net, 2);
    StrategyProfile crowded{{path_of(net, {"e"}), path_of(net, {"e"})}};
    EXPECT_THROW(potential(game, crowded), DomainError);
}

// The exact-potential identity on random games: Phi(s') - Phi(s) equals the
// deviating agent's cost change, for unilateral moves between feasible
// profiles.
TEST(Potential, UnilateralDeviationIdentity) {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 40 && checked < 400; ++seed) {
        RandomGameSpec spec;
        spec.cls = NetworkClass::Sp;
        spec.agents = 3;
        spec.max_edges = 6;
        spec.seed = seed;
        Game game = random_game(spec);
        auto profiles = oracle::all_profiles(game);
        auto strat = agent_strategies(game);
        for (const auto& profile : profiles) {
            if (!is_feasible(game, profile)) continue;
            for (int i = 0; i < game.agent_count() && checked < 400; ++i) {
                for (const auto& alt : strat[static_cast<std::size_t>(i)]) {
                    StrategyProfile moved = profile;
                    moved.paths[static_cast<std::size_t>(i)] = alt;
                    if (!is_feasible(game, moved)) continue;
                    Rational lhs = potential(game, moved) - potential(game, profile);
                    Rational rhs = agent_cost(game, moved, i).value() -
                                   agent_cost(game, profile, i).value();
                    ASSERT_EQ(lhs, rhs);
                    ++checked;
                }
            }
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(CoreInvariants, SocialCostTelescopesOnRandomGames) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RandomGameSpec spec;
        spec.cls = NetworkClass::General;
        spec.agents = 2;
        spec.max_edges = 7;
        spec.seed = seed;
        Game game = random_game(spec);
        for (const auto& profile : oracle::all_profiles(game)) {
            if (!oracle::feasible(game, profile)) {
                EXPECT_TRUE(social_cost(game, profile).is_infinite());
                continue;
            }
            EXPECT_EQ(social_cost(game, profile).value(),
                      oracle::social_cost(game, profile).value());
        }
    }
}

TEST(CoreInvariants, PathsAreSimpleAndUnique) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RandomGameSpec spec;
        spec.cls = NetworkClass::General;
        spec.agents = 2;
        spec.max_edges = 8;
        spec.seed = seed;
        Game game = random_game(spec);
        auto paths = enumerate_paths(game.network(), game.network().source(),
                                     game.network().sink());
        std::set<std::string> keys;
        for (const auto& p : paths) {
            EXPECT_TRUE(keys.insert(p.key(game.network())).second);
            std::set<NodeId> nodes{game.network().source()};
            NodeId at = game.network().source();
            for (const auto& s : p.steps) {
                const Edge& e = game.network().edge(s.edge);
                at = s.forward ? e.to : e.from;
                EXPECT_TRUE(nodes.insert(at).second);
            }
        }
    }
}

TEST(JsonIo, GameRoundTrip) {
    Game game = build_fig1().game;
    Json j = game_to_json(game);
    Game back = game_from_json(j);
    EXPECT_EQ(game_to_json(back).dump(), j.dump());
    EXPECT_EQ(back.agent_count(), 2);
    EXPECT_EQ(back.network().edge(back.network().edge_index("b")).cost, Rational(6, 5));
}

TEST(JsonIo, DecimalCostRejected) {
    Json j = game_to_json(build_fig1().game);
    j["edges"][0]["cost"] = 0.7;
    EXPECT_THROW(game_from_json(j), InputError);
    j["edges"][0]["cost"] = "0.7";
    EXPECT_THROW(game_from_json(j), InputError);
    j["edges"][0]["cost"] = 1;
    EXPECT_NO_THROW(game_from_json(j));
}

TEST(JsonIo, ProfileRoundTripAndValidation) {
    Game game = build_fig1().game;
    StrategyProfile profile{
        {path_of(game.network(), {"a"}), path_of(game.network(), {"b", "c"})}};
    Json j = profile_to_json(game.network(), profile);
    StrategyProfile back = profile_from_json(game, j);
    EXPECT_EQ(back.paths[1].edge_ids(game.network()), (std::vector<EdgeId>{"b", "c"}));
    Json broken = Json::array({Json::array({"a"}), Json::array({"c", "b"})});
    EXPECT_THROW(profile_from_json(game, broken), InputError);
}

}  // namespace
