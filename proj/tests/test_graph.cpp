#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "chordal/graph.hpp"
#include "oracles.hpp"

using namespace chordal;
using oracle::complete_graph;
using oracle::cycle_graph;
using oracle::path_graph;
using oracle::star_graph;

// Labels are 0-based: the path 1-2-3 is 0-1-2 here.

TEST_CASE("degree on small graphs", "[graph]") {
    CHECK(degree(path_graph(3), 1) == 2);
    const Graph k4 = complete_graph(4);
    for (Vertex v = 0; v < 4; ++v) {
        CHECK(degree(k4, v) == 3);
    }
    CHECK(degree(Graph(1), 0) == 0);
}

TEST_CASE("degree rejects inactive and out-of-range vertices", "[graph]") {
    Graph g = path_graph(3);
    CHECK_THROWS_AS(degree(g, 3), InvalidVertexError);
    CHECK_THROWS_AS(degree(g, -1), InvalidVertexError);
    g.eliminate(1);
    CHECK_THROWS_AS(degree(g, 1), InvalidVertexError);
}

TEST_CASE("eliminate inserts only missing clique edges", "[graph]") {
    SECTION("star center") {
        const auto r = eliminate(star_graph(3), 0);
        CHECK(r.fill_count == 3);
        CHECK(r.fill_edges == std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}});
        CHECK(r.graph.num_active() == 3);
        CHECK(r.graph.num_edges() == 3);
    }
    SECTION("complete graph") {
        for (Vertex v = 0; v < 4; ++v) {
            CHECK(eliminate(complete_graph(4), v).fill_count == 0);
        }
    }
    SECTION("four-cycle leaves a triangle") {
        for (Vertex v = 0; v < 4; ++v) {
            const auto r = eliminate(cycle_graph(4), v);
            CHECK(r.fill_count == 1);
            CHECK(r.graph.num_active() == 3);
            CHECK(r.graph.num_edges() == 3);
            CHECK(r.graph.check_invariants());
        }
    }
    SECTION("inactive vertex") {
        Graph g = cycle_graph(4);
        g.eliminate(2);
        CHECK_THROWS_AS(eliminate(g, 2), InvalidVertexError);
    }
}

TEST_CASE("fill_if_eliminated agrees with eliminate", "[graph]") {
    Rng rng = make_stream({11});
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = oracle::random_graph(12, 0.35, rng);
        for (Vertex v : g.active()) {
            CHECK(g.fill_if_eliminated(v) == eliminate(g, v).fill_count);
        }
    }
}

TEST_CASE("min_degree_nodes", "[graph]") {
    CHECK(min_degree_nodes(path_graph(3)) == std::vector<Vertex>{0, 2});
    CHECK(min_degree_nodes(complete_graph(4)) == std::vector<Vertex>{0, 1, 2, 3});
    CHECK(min_degree_nodes(star_graph(3)) == std::vector<Vertex>{1, 2, 3});
    CHECK_THROWS_AS(min_degree_nodes(Graph(0)), EmptyGraphError);
    Graph g(1);
    g.eliminate(0);
    CHECK_THROWS_AS(min_degree_nodes(g), EmptyGraphError);
}

TEST_CASE("chordal_extension examples", "[graph]") {
    SECTION("four-cycle gets one chord") {
        Rng rng = make_stream({3});
        for (int i = 0; i < 10; ++i) {
            const auto ord = oracle::random_permutation(4, rng);
            const auto ext = chordal_extension(cycle_graph(4), ord);
            CHECK(ext.total_fill == 1);
            CHECK(ext.extension.num_edges() == 5);
            CHECK(is_chordal(ext.extension));
        }
    }
    SECTION("path eliminated from its ends") {
        const std::vector<Vertex> ord{0, 3, 1, 2};
        const auto ext = chordal_extension(path_graph(4), ord);
        CHECK(ext.total_fill == 0);
        CHECK(ext.extension == path_graph(4));
    }
    SECTION("matches step-wise replay") {
        Rng rng = make_stream({8});
        const Graph g = oracle::random_graph(8, 0.4, rng);
        const auto ord = oracle::random_permutation(8, rng);
        Graph state = g;
        std::size_t replay = 0;
        for (Vertex v : ord) {
            auto r = eliminate(state, v);
            replay += r.fill_count;
            state = std::move(r.graph);
        }
        CHECK(chordal_extension(g, ord).total_fill == replay);
    }
}

TEST_CASE("chordal_extension rejects non-permutations", "[graph]") {
    const Graph g = cycle_graph(4);
    CHECK_THROWS_AS(chordal_extension(g, std::vector<Vertex>{0, 1, 2}), InvalidOrderingError);
    CHECK_THROWS_AS(chordal_extension(g, std::vector<Vertex>{0, 1, 2, 2}), InvalidOrderingError);
    CHECK_THROWS_AS(chordal_extension(g, std::vector<Vertex>{0, 1, 2, 4}), InvalidOrderingError);
}

TEST_CASE("is_chordal examples", "[graph]") {
    CHECK_FALSE(is_chordal(cycle_graph(4)));
    CHECK_FALSE(is_chordal(cycle_graph(7)));
    CHECK(is_chordal(complete_graph(4)));
    CHECK(is_chordal(Graph(0)));
    CHECK(is_chordal(Graph(1)));
    CHECK(is_chordal(star_graph(5)));
    CHECK(is_chordal(path_graph(6)));

    Rng rng = make_stream({5});
    for (int i = 0; i < 20; ++i) {
        // Random tree: attach each vertex to an earlier one.
        Graph t(15);
        for (Vertex v = 1; v < 15; ++v) {
            t.add_edge(v, static_cast<Vertex>(uniform_index(rng, static_cast<std::uint64_t>(v))));
        }
        CHECK(is_chordal(t));
    }
}

TEST_CASE("is_chordal agrees with the induced-cycle definition", "[graph][property]") {
    Rng rng = make_stream({21});
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 8);
        const Graph g = oracle::random_graph(n, 0.2 + 0.6 * uniform01(rng), rng);
        INFO(to_edge_list(g));
        CHECK(is_chordal(g) == oracle::chordal_by_definition(g));
    }
}

TEST_CASE("elimination properties on random graphs", "[graph][property]") {
    Rng rng = make_stream({99});
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 30);
        const Graph g = oracle::random_graph(n, uniform01(rng) * 0.5, rng);
        const auto ord = oracle::random_permutation(n, rng);

        Graph state = g;
        for (Vertex v : ord) {
            state.eliminate(v);
            REQUIRE(state.check_invariants());
        }
        const auto ext = chordal_extension(g, ord);
        CHECK(is_chordal(ext.extension));
        CHECK(ext.total_fill == ext.extension.num_edges() - g.num_edges());
        for (const auto& e : g.edges()) {
            CHECK(ext.extension.has_edge(e.u, e.v));
        }
        // The ordering is perfect for its own extension.
        CHECK(chordal_extension(ext.extension, ord).total_fill == 0);
    }
}

TEST_CASE("perfect elimination ordering of a chordal graph adds no fill", "[graph][property]") {
    Rng rng = make_stream({4});
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = oracle::random_graph(15, 0.3, rng);
        const auto ext = chordal_extension(g, oracle::random_permutation(15, rng)).extension;
        auto mcs = maximum_cardinality_search(ext);
        std::reverse(mcs.begin(), mcs.end());
        REQUIRE(is_perfect_elimination_ordering(ext, mcs));
        CHECK(chordal_extension(ext, mcs).total_fill == 0);
    }
}

TEST_CASE("fill agrees with the fill-path oracle for every ordering", "[graph][oracle]") {
    Rng rng = make_stream({17});
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 3 + uniform_index(rng, 4);
        const Graph g = oracle::random_graph(n, 0.45, rng);
        std::vector<Vertex> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::size_t best = SIZE_MAX;
        do {
            const auto fill = chordal_extension(g, perm).total_fill;
            REQUIRE(fill == oracle::fill_by_paths(g, perm));
            best = std::min(best, fill);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(best == oracle::exhaustive_min_fill(g));
    }
}

TEST_CASE("minimum fill on n <= 8 matches the exhaustive oracle", "[graph][oracle]") {
    Rng rng = make_stream({23});
    for (int trial = 0; trial < 3; ++trial) {
        const Graph g = oracle::random_graph(8, 0.35, rng);
        std::vector<Vertex> perm(8);
        std::iota(perm.begin(), perm.end(), 0);
        std::size_t best = SIZE_MAX;
        do {
            best = std::min(best, chordal_extension(g, perm).total_fill);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(best == oracle::exhaustive_min_fill(g));
    }
}

TEST_CASE("edge-list format", "[graph][io]") {
    const Graph c4 = cycle_graph(4);
    CHECK(to_edge_list(c4) == "4 4\n0 1\n0 3\n1 2\n2 3\n");

    Rng rng = make_stream({31});
    for (int i = 0; i < 20; ++i) {
        const Graph g = oracle::random_graph(1 + uniform_index(rng, 40), 0.2, rng);
        const std::string text = to_edge_list(g);
        const Graph back = from_edge_list(text);
        CHECK(back == g);
        CHECK(to_edge_list(back) == text);
    }

    // Unordered, duplicated input is canonicalized.
    CHECK(to_edge_list(from_edge_list("3 3\n2 1\n1 0\n0 1\n")) == "3 2\n0 1\n1 2\n");

    CHECK_THROWS_AS(from_edge_list(""), ParseError);
    CHECK_THROWS_AS(from_edge_list("3\n"), ParseError);
    CHECK_THROWS_AS(from_edge_list("3 1\n0 3\n"), ParseError);
    CHECK_THROWS_AS(from_edge_list("3 1\n1 1\n"), ParseError);
    CHECK_THROWS_AS(from_edge_list("3 2\n0 1\n"), ParseError);
    try {
        from_edge_list("3 2\n0 1\n0 x\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}
