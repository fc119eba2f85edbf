#include <doctest.h>

#include <filesystem>
#include <numeric>
#include <random>

#include "gsum/error.hpp"
#include "gsum/graph.hpp"
#include "gsum/graph_io.hpp"
#include "oracles.hpp"

using namespace gsum;

namespace {

std::vector<CayleySpec> small_families() {
    std::vector<CayleySpec> out;
    for (std::size_t n = 3; n <= 12; ++n) out.push_back(CayleySpec::cycle(n));
    for (std::size_t n = 2; n <= 8; ++n) out.push_back(CayleySpec::complete(n));
    for (std::size_t d = 1; d <= 4; ++d) out.push_back(CayleySpec::hypercube(d));
    out.push_back(CayleySpec::petersen());
    out.push_back(CayleySpec::circulant(9, {1, 2}));
    out.push_back(CayleySpec::circulant(7, {1, 3}, true));
    out.push_back(CayleySpec::product(CayleySpec::cycle(5), CayleySpec::complete(2)));
    return out;
}

Graph random_digraph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<Edge> edges;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
            if (u != v && coin(rng)) edges.push_back({u, v});
    return Graph(n, edges, true);
}

}  // namespace

TEST_CASE("family sizes and degrees") {
    struct Row {
        CayleySpec spec;
        std::size_t n, d, diameter;
    };
    const std::vector<Row> rows{
        {CayleySpec::cycle(5), 5, 2, 2},
        {CayleySpec::cycle(8), 8, 2, 4},
        {CayleySpec::complete(6), 6, 5, 1},
        {CayleySpec::hypercube(3), 8, 3, 3},
        {CayleySpec::petersen(), 10, 3, 2},
        {CayleySpec::product(CayleySpec::cycle(5), CayleySpec::complete(2)), 10, 3, 3},
        {CayleySpec::circulant(9, {1, 2}), 9, 4, 2},
    };
    for (const auto& r : rows) {
        CAPTURE(describe(r.spec));
        const Graph g = build_family(r.spec);
        CHECK(g.n() == r.n);
        REQUIRE(g.regular_degree().has_value());
        CHECK(*g.regular_degree() == r.d);
        CHECK(g.symmetric());
        CHECK(oracle::diameter(g) == r.diameter);
    }
}

TEST_CASE("petersen is the Kneser graph K(5,2)") {
    const Graph g = build_family(CayleySpec::petersen());
    CHECK(g.edge_count() == 30);
    // No triangles and no 4-cycles: girth 5.
    const Eigen::MatrixXd a = oracle::adjacency(g);
    const Eigen::MatrixXd a2 = a * a;
    CHECK((a * a2).trace() == doctest::Approx(0.0));
    for (Eigen::Index i = 0; i < 10; ++i)
        for (Eigen::Index j = 0; j < 10; ++j)
            if (i != j) CHECK(a2(i, j) <= 1.0);
}

TEST_CASE("metrics agree with Floyd-Warshall") {
    for (const auto& spec : small_families()) {
        CAPTURE(describe(spec));
        const Graph g = build_family(spec);
        const auto dist = oracle::floyd(g);
        const GraphMetrics gm = metrics(g);
        REQUIRE(gm.diameter.has_value());
        CHECK(*gm.diameter == oracle::diameter(g));
        for (Vertex v = 0; v < g.n(); ++v) {
            const auto from = bfs_distances(g, v);
            const auto to = bfs_distances_to(g, v);
            for (Vertex u = 0; u < g.n(); ++u) {
                CHECK(from[u] == dist[v][u]);
                CHECK(to[u] == dist[u][v]);
            }
            CHECK(*gm.eccentricity[v] == oracle::eccentricity(g, v));
        }
    }
}

TEST_CASE("metrics on random digraphs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = random_digraph(7, 0.3, rng);
        const auto dist = oracle::floyd(g);
        const GraphMetrics gm = metrics(g);
        bool strongly = true;
        for (const auto& row : dist)
            for (std::size_t x : row) strongly = strongly && x < oracle::kInf;
        CHECK(gm.connected() == strongly);
        if (strongly) CHECK(*gm.diameter == oracle::diameter(g));
        for (Vertex v = 0; v < g.n(); ++v) {
            const auto from = bfs_distances(g, v);
            for (Vertex u = 0; u < g.n(); ++u) {
                if (dist[v][u] >= oracle::kInf) {
                    CHECK(from[u] == kUnreachable);
                } else {
                    CHECK(from[u] == dist[v][u]);
                }
            }
        }
    }
}

TEST_CASE("distance-2 table counts 2-paths") {
    for (const auto& spec : small_families()) {
        CAPTURE(describe(spec));
        const Graph g = build_family(spec);
        const auto dist = oracle::floyd(g);
        const Eigen::MatrixXd a = oracle::adjacency(g);
        const Eigen::MatrixXd a2 = a * a;  // a2(k, j): 2-paths j -> i -> k
        const Distance2Table table = distance2_table(g);
        std::size_t expected = 0;
        for (Vertex j = 0; j < g.n(); ++j) {
            for (Vertex k = 0; k < g.n(); ++k) {
                if (dist[j][k] != 2) continue;
                ++expected;
                auto it = table.find({j, k});
                REQUIRE(it != table.end());
                CHECK(static_cast<double>(it->second) == a2(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
            }
        }
        CHECK(table.size() == expected);
    }
}

TEST_CASE("cycle(5) distance-2 pairs have one path each") {
    const Distance2Table t = distance2_table(build_family(CayleySpec::cycle(5)));
    CHECK(t.size() == 10);
    CHECK(t.at({0, 2}) == 1);
    CHECK(t.at({0, 3}) == 1);
    CHECK(t.count({0, 1}) == 0);
}

TEST_CASE("product diameters add") {
    const std::vector<CayleySpec> factors{CayleySpec::cycle(4), CayleySpec::cycle(5), CayleySpec::complete(3),
                                          CayleySpec::hypercube(2), CayleySpec::petersen()};
    for (const auto& a : factors) {
        for (const auto& b : factors) {
            const Graph g1 = build_family(a), g2 = build_family(b);
            const Graph p = build_family(CayleySpec::product(a, b));
            CAPTURE(describe(CayleySpec::product(a, b)));
            CHECK(p == cartesian_product(g1, g2));
            CHECK(*p.regular_degree() == *g1.regular_degree() + *g2.regular_degree());
            CHECK(oracle::diameter(p) == oracle::diameter(g1) + oracle::diameter(g2));
        }
    }
}

TEST_CASE("product vertex labels") {
    const Graph g = cartesian_product(build_family(CayleySpec::cycle(5)), build_family(CayleySpec::complete(2)));
    CHECK(g.has_edge(product_vertex(0, 0, 2), product_vertex(1, 0, 2)));
    CHECK(g.has_edge(product_vertex(3, 0, 2), product_vertex(3, 1, 2)));
    CHECK_FALSE(g.has_edge(product_vertex(0, 0, 2), product_vertex(1, 1, 2)));
}

TEST_CASE("relabelling preserves distances") {
    std::mt19937_64 rng(3);
    for (const auto& spec : small_families()) {
        const Graph g = build_family(spec);
        std::vector<Vertex> perm(g.n());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const Graph h = g.relabel(perm);
        CHECK(h.edge_count() == g.edge_count());
        const auto dg = oracle::floyd(g);
        const auto gm = metrics(h);
        for (Vertex u = 0; u < g.n(); ++u) {
            const auto dh = bfs_distances(h, perm[u]);
            for (Vertex v = 0; v < g.n(); ++v) CHECK(dh[perm[v]] == dg[u][v]);
        }
        CHECK(gm.diameter == metrics(g).diameter);
    }
}

TEST_CASE("edge ids follow sorted order") {
    const Graph g = build_family(CayleySpec::petersen());
    for (std::size_t id = 0; id < g.edge_count(); ++id) {
        const Edge e = g.edges()[id];
        CHECK(g.edge_id(e.from, e.to) == id);
        if (id > 0) CHECK(g.edges()[id - 1] < e);
    }
    for (Vertex v = 0; v < g.n(); ++v) {
        for (std::size_t id : g.in_edges(v)) CHECK(g.edges()[id].to == v);
        for (std::size_t id : g.out_edges(v)) CHECK(g.edges()[id].from == v);
    }
}

TEST_CASE("undirected input is symmetrized and deduplicated") {
    const Graph g(3, {{0, 1}, {1, 0}, {1, 2}, {0, 1}}, false);
    CHECK(g.edge_count() == 4);
    CHECK(g.has_edge(2, 1));
    CHECK(g.symmetric());
    CHECK_FALSE(g.regular_degree().has_value());
}

TEST_CASE("invalid graphs are rejected") {
    CHECK_THROWS_AS(Graph(3, {{1, 1}}, true), InvalidArgument);
    CHECK_THROWS_AS(Graph(3, {{0, 3}}, true), InvalidArgument);
    CHECK_THROWS_AS(build_family(CayleySpec::cycle(1)), InvalidArgument);
    CHECK(build_family(CayleySpec::cycle(2)) == build_family(CayleySpec::complete(2)));
    CHECK_THROWS_AS(build_family(CayleySpec::complete(0)), InvalidArgument);
    CHECK_THROWS_AS(build_family(CayleySpec::circulant(5, {0})), InvalidArgument);
    CHECK_THROWS_AS(build_family(CayleySpec::circulant(5, {5})), InvalidArgument);
}

TEST_CASE("disconnected graphs have no diameter") {
    const Graph g(4, {{0, 1}, {2, 3}}, false);
    const GraphMetrics gm = metrics(g);
    CHECK(gm.regular());
    CHECK_FALSE(gm.connected());
    CHECK(bfs_distances(g, 0)[2] == kUnreachable);
}

TEST_CASE("circulant connections") {
    CHECK(build_family(CayleySpec::cycle(7)).circulant_connections() == std::vector<std::size_t>{1, 6});
    CHECK(build_family(CayleySpec::circulant(9, {1, 2})).circulant_connections() ==
          std::vector<std::size_t>{1, 2, 7, 8});
    CHECK(build_family(CayleySpec::circulant(7, {1, 3}, true)).circulant_connections() ==
          std::vector<std::size_t>{1, 3});
    CHECK_FALSE(build_family(CayleySpec::petersen()).circulant_connections().has_value());
}

TEST_CASE("family names round trip") {
    for (const auto& spec : small_families()) {
        const std::string name = describe(spec);
        CAPTURE(name);
        CHECK(build_family(parse_family(name)) == build_family(spec));
    }
    CHECK(describe(parse_family("product cycle 5 complete 2")) == "product(cycle(5),complete(2))");
    CHECK(describe(parse_family("circulant 9 1,2")) == "circulant(9;1,2)");
    CHECK_THROWS_AS(parse_family("cycle"), InvalidArgument);
    CHECK_THROWS_AS(parse_family("cycle five"), InvalidArgument);
    CHECK_THROWS_AS(parse_family("cycle 5 6"), InvalidArgument);
    CHECK_THROWS_AS(parse_family("mobius 8"), InvalidArgument);
}

TEST_CASE("graph text and JSON round trip") {
    std::mt19937_64 rng(5);
    std::vector<Graph> graphs;
    for (const auto& spec : small_families()) graphs.push_back(build_family(spec));
    for (int i = 0; i < 5; ++i) graphs.push_back(random_digraph(6, 0.4, rng));
    for (const Graph& g : graphs) {
        CHECK(parse_graph(to_text(g)) == g);
        CHECK(parse_graph(to_json_text(g)) == g);
    }
}

TEST_CASE("graph files by extension") {
    const std::filesystem::path dir = GSUM_TEST_TMP;
    std::filesystem::create_directories(dir);
    const Graph g = build_family(CayleySpec::petersen());
    save_graph(g, dir / "pet.json");
    save_graph(g, dir / "pet.txt");
    CHECK(load_graph(dir / "pet.json") == g);
    CHECK(load_graph(dir / "pet.txt") == g);
    CHECK_THROWS_AS(load_graph(dir / "missing.txt"), Error);
}

TEST_CASE("parse errors carry the line") {
    try {
        parse_graph("n 3 directed 0\n0 1\n1 1\n");
        FAIL("self-loop accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse_graph("n 3 directed 0\n0 1\n\n2 7\n");
        FAIL("out-of-range vertex accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_graph("nodes 3\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("n 3 directed 0\n0 x\n"), ParseError);
    CHECK_THROWS_AS(parse_graph("{\"n\": 3, \"edges\": [[0, 3]]}"), ParseError);
    CHECK_THROWS_AS(parse_graph("{\"n\": 3,"), ParseError);
}
