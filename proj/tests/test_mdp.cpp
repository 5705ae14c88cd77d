#include <catch_amalgamated.hpp>

#include <sstream>

#include "chordal/data.hpp"
#include "chordal/mdp.hpp"
#include "oracles.hpp"

using namespace chordal;
using Catch::Approx;

namespace {

void check_trajectory_shape(const Graph& g, const Trajectory& t) {
    REQUIRE(t.steps.size() == g.num_active());
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        CHECK(t.steps[i].state_size == g.num_active() - i);
    }
    CHECK(t.total_cost == total_cost(t));
}

} // namespace

TEST_CASE("rollout examples", "[mdp]") {
    Rng rng = make_stream({1});
    const Graph k5 = oracle::complete_graph(5);
    for (const Policy& p : {Policy(uniform_policy), Policy(min_degree_policy)}) {
        CHECK(rollout(k5, p, rng).total_cost == 0);
    }
    for (int i = 0; i < 20; ++i) {
        CHECK(rollout(oracle::cycle_graph(4), min_degree_policy, rng).total_cost == 1);
        CHECK(rollout(oracle::path_graph(4), min_degree_policy, rng).total_cost == 0);
    }
    CHECK_THROWS_AS(rollout(Graph(0), uniform_policy, rng), EmptyGraphError);
}

TEST_CASE("rollout includes the final single-vertex step", "[mdp]") {
    Rng rng = make_stream({2});
    const Graph g = oracle::cycle_graph(6);
    const auto t = rollout(g, min_degree_policy, rng);
    check_trajectory_shape(g, t);
    CHECK(t.steps.back().state_size == 1);
    CHECK(t.steps.back().step_cost == 0);
}

TEST_CASE("rollout rejects malformed policies", "[mdp]") {
    Rng rng = make_stream({3});
    const Policy short_policy = [](const Graph& g) {
        auto d = uniform_policy(g);
        d.labels.pop_back();
        d.probs.pop_back();
        d.log_probs.pop_back();
        return d;
    };
    CHECK_THROWS_AS(rollout(oracle::cycle_graph(4), short_policy, rng), PolicyContractError);
    const Policy unnormalized = [](const Graph& g) {
        auto d = uniform_policy(g);
        d.probs[0] += 0.5;
        return d;
    };
    CHECK_THROWS_AS(rollout(oracle::cycle_graph(4), unnormalized, rng), PolicyContractError);
}

TEST_CASE("total_cost", "[mdp]") {
    CHECK(total_cost(Trajectory{}) == 0);
    Rng rng = make_stream({4});
    CHECK(total_cost(rollout(oracle::cycle_graph(4), min_degree_policy, rng)) == 1);

    DatasetSpec spec;
    spec.count = 5;
    spec.n_min = spec.n_max = 10;
    spec.p_min = 0.2;
    spec.p_max = 0.5;
    spec.seed = 9;
    for (const auto& rec : generate_er(spec)) {
        const auto t = rollout(rec.graph, uniform_policy, rng);
        check_trajectory_shape(rec.graph, t);
        Graph state = rec.graph;
        std::size_t replay = 0;
        for (const auto& s : t.steps) {
            replay += eliminate(state, s.action).fill_count;
            state = eliminate(state, s.action).graph;
        }
        CHECK(total_cost(t) == replay);
        CHECK(t.total_cost == chordal_extension(rec.graph, t.ordering()).total_fill);
    }
}

TEST_CASE("expected_immediate_cost", "[mdp]") {
    CHECK(expected_immediate_cost(oracle::complete_graph(6), uniform_policy) == 0.0);
    CHECK(expected_immediate_cost(oracle::cycle_graph(4), uniform_policy) == 1.0);
    CHECK(expected_immediate_cost(oracle::star_graph(4), uniform_policy) == Approx(1.2));
    CHECK(expected_immediate_cost(oracle::star_graph(4), min_degree_policy) == 0.0);
}

TEST_CASE("expected_immediate_cost lower bound", "[mdp][property]") {
    Rng rng = make_stream({5});
    for (int trial = 0; trial < 100; ++trial) {
        const Graph g = oracle::random_graph(2 + uniform_index(rng, 15), 0.4, rng);
        std::size_t best = SIZE_MAX;
        std::vector<Vertex> argmin;
        for (Vertex v : g.active()) {
            const std::size_t f = g.fill_if_eliminated(v);
            if (f < best) {
                best = f;
                argmin.clear();
            }
            if (f == best) {
                argmin.push_back(v);
            }
        }
        CHECK(expected_immediate_cost(g, uniform_policy) >= static_cast<double>(best));
        const Policy on_argmin = [&](const Graph& s) {
            return detail::uniform_over(s, argmin);
        };
        CHECK(expected_immediate_cost(g, on_argmin) == Approx(static_cast<double>(best)));
    }
}

TEST_CASE("deterministic transitions and policies", "[mdp][property]") {
    Rng rng = make_stream({6});
    const Graph g = oracle::random_graph(20, 0.3, rng);
    CHECK(eliminate(g, 3).graph == eliminate(g, 3).graph);

    // Smallest minimum-degree vertex: deterministic, so seeds are irrelevant.
    const Policy first_min = [](const Graph& s) {
        const auto nodes = min_degree_nodes(s);
        return detail::uniform_over(s, std::vector<Vertex>{nodes.front()});
    };
    Rng a = make_stream({100});
    Rng b = make_stream({200});
    CHECK(rollout(g, first_min, a) == rollout(g, first_min, b));
}

TEST_CASE("trajectory csv export", "[mdp][io]") {
    Rng rng = make_stream({7});
    const auto t = rollout(oracle::cycle_graph(4), min_degree_policy, rng);
    std::ostringstream os;
    write_trajectory_csv_header(os);
    write_trajectory_csv(os, "c4", t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "graph_id,step,state_size,action,step_cost");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        CHECK(line.rfind("c4," + std::to_string(rows) + "," + std::to_string(4 - rows) + ",", 0) ==
              0);
        ++rows;
    }
    CHECK(rows == 4);
}
