#include <catch_amalgamated.hpp>

#include <cmath>

#include "chordal/policy.hpp"
#include "oracles.hpp"

using namespace chordal;
using Catch::Approx;

TEST_CASE("min_degree_policy puts 1/k on minimum-degree vertices", "[policy]") {
    const auto p3 = min_degree_policy(oracle::path_graph(3));
    CHECK(p3.labels == std::vector<Vertex>{0, 1, 2});
    CHECK(p3.probs == std::vector<double>{0.5, 0.0, 0.5});

    const auto k4 = min_degree_policy(oracle::complete_graph(4));
    CHECK(k4.probs == std::vector<double>(4, 0.25));

    const auto star = min_degree_policy(oracle::star_graph(3));
    CHECK(star.probs[0] == 0.0);
    for (int i = 1; i <= 3; ++i) {
        CHECK(star.probs[i] == 1.0 / 3.0);
    }
    CHECK_THROWS_AS(min_degree_policy(Graph(0)), EmptyGraphError);
}

TEST_CASE("uniform_policy", "[policy]") {
    CHECK(uniform_policy(Graph(1)).probs == std::vector<double>{1.0});
    CHECK(uniform_policy(oracle::cycle_graph(4)).probs == std::vector<double>(4, 0.25));
    Rng rng = make_stream({1});
    const auto d = uniform_policy(oracle::random_graph(10, 0.3, rng));
    CHECK(d.probs == std::vector<double>(10, 0.1));
    CHECK_THROWS_AS(uniform_policy(Graph(0)), EmptyGraphError);
}

TEST_CASE("policies follow labels after elimination", "[policy]") {
    Graph g = oracle::path_graph(5); // 0-1-2-3-4
    g.eliminate(0);
    const auto d = min_degree_policy(g);
    CHECK(d.labels == std::vector<Vertex>{1, 2, 3, 4});
    CHECK(d.support() == std::vector<Vertex>{1, 4});
    CHECK(d.prob(0) == 0.0);
    CHECK(d.prob(4) == 0.5);
}

TEST_CASE("policy distribution invariants", "[policy][property]") {
    Rng rng = make_stream({2});
    for (int trial = 0; trial < 100; ++trial) {
        const Graph g = oracle::random_graph(1 + uniform_index(rng, 25), 0.3 * uniform01(rng), rng);
        const auto md = min_degree_policy(g);
        validate_distribution(md, g);
        CHECK(md.support() == min_degree_nodes(g));
        validate_distribution(uniform_policy(g), g);
    }
}

TEST_CASE("min-degree equals uniform on regular graphs", "[policy]") {
    for (std::size_t n : {3u, 5u, 8u}) {
        const Graph c = oracle::cycle_graph(n);
        CHECK(min_degree_policy(c).probs == uniform_policy(c).probs);
        const Graph k = oracle::complete_graph(n);
        CHECK(min_degree_policy(k).probs == uniform_policy(k).probs);
    }
}

TEST_CASE("sample_action", "[policy]") {
    Rng rng = make_stream({3});
    SECTION("degenerate") {
        PolicyDistribution d{{4, 7, 9}, {0.0, 1.0, 0.0}, {}};
        for (int i = 0; i < 1000; ++i) {
            CHECK(sample_action(d, rng) == 7);
        }
    }
    SECTION("fair split over 1e5 draws, zero mass never drawn") {
        PolicyDistribution d{{0, 1, 2}, {0.5, 0.0, 0.5}, {}};
        int zeros = 0;
        int middles = 0;
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) {
            const Vertex a = sample_action(d, rng);
            zeros += a == 0;
            middles += a == 1;
        }
        const double freq = static_cast<double>(zeros) / draws;
        CHECK(freq >= 0.49);
        CHECK(freq <= 0.51);
        CHECK(middles == 0);
    }
    SECTION("reproducible with equal seeds") {
        const auto d = uniform_policy(oracle::complete_graph(20));
        Rng a = make_stream({77});
        Rng b = make_stream({77});
        for (int i = 0; i < 100; ++i) {
            CHECK(sample_action(d, a) == sample_action(d, b));
        }
    }
}

TEST_CASE("kl_loss examples", "[policy]") {
    PolicyDistribution p{{0, 1}, {1.0, 0.0}, {}};
    PolicyDistribution q{{0, 1}, {0.5, 0.5}, {}};
    CHECK(kl_loss(p, p) == 0.0);
    CHECK(kl_loss(q, q) == 0.0);
    CHECK(kl_loss(p, q) == Approx(std::log(2.0)).epsilon(1e-15));

    const Graph p3 = oracle::path_graph(3);
    CHECK(kl_loss(min_degree_policy(p3), uniform_policy(p3)) ==
          Approx(0.405465108108164).epsilon(1e-12));

    PolicyDistribution zero{{0, 1}, {0.0, 1.0}, {}};
    CHECK(std::isinf(kl_loss(p, zero)));
    PolicyDistribution other{{0, 2}, {0.5, 0.5}, {}};
    CHECK_THROWS_AS(kl_loss(p, other), PolicyContractError);
}

TEST_CASE("softmax_distribution", "[policy]") {
    const std::vector<double> logits{-10.0, -20.0, -10.0};
    const auto d = softmax_distribution({0, 1, 2}, logits);
    // Hand arithmetic: 1 / (2 + e^-10) and e^-10 / (2 + e^-10).
    const double e = std::exp(-10.0);
    CHECK(d.probs[0] == Approx(1.0 / (2.0 + e)).epsilon(1e-14));
    CHECK(d.probs[1] == Approx(e / (2.0 + e)).epsilon(1e-14));
    CHECK(d.log_probs[1] == Approx(-10.0 - std::log(2.0 + e)).epsilon(1e-14));

    // Underflowing probabilities keep finite log-probabilities.
    const std::vector<double> wide{0.0, -2000.0};
    const auto w = softmax_distribution({0, 1}, wide);
    CHECK(w.probs[1] == 0.0);
    CHECK(w.log_probs[1] == Approx(-2000.0));
}
