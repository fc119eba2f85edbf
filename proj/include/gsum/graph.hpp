#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gsum {

using Vertex = std::size_t;

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

struct Edge {
    Vertex from = 0;
    Vertex to = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed graph without self-loops, stored in compressed form in both
// directions. Undirected graphs are symmetric edge sets with directed() false.
// Edges are kept sorted by (from, to); an edge's position in that order is its
// id, which step matrices and message buffers index by.
class Graph {
public:
    Graph() = default;

    // Throws InvalidArgument on self-loops or out-of-range endpoints.
    // Undirected input is closed under reversal; duplicates are merged.
    Graph(std::size_t n, std::vector<Edge> edges, bool directed);

    std::size_t n() const { return n_; }
    bool directed() const { return directed_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const Vertex> out_neighbors(Vertex v) const;
    std::span<const Vertex> in_neighbors(Vertex v) const;
    // Ids of the edges entering v, ordered by source vertex.
    std::span<const std::size_t> in_edges(Vertex v) const;
    // Ids of the edges leaving v, ordered by target vertex.
    std::span<const std::size_t> out_edges(Vertex v) const;

    std::size_t out_degree(Vertex v) const { return out_neighbors(v).size(); }
    std::size_t in_degree(Vertex v) const { return in_neighbors(v).size(); }

    std::optional<std::size_t> edge_id(Vertex from, Vertex to) const;
    bool has_edge(Vertex from, Vertex to) const { return edge_id(from, to).has_value(); }

    // Common in/out degree if every vertex has it.
    std::optional<std::size_t> regular_degree() const;
    bool symmetric() const;

    // A(u, v) = 1 iff the edge v -> u exists, so A * x sums in-neighbour values.
    Eigen::MatrixXd adjacency() const;

    // Offsets s with 0 -> s an edge, if the edge set is invariant under
    // v -> v + 1 (mod n) in the current labeling; nullopt otherwise.
    std::optional<std::vector<std::size_t>> circulant_connections() const;

    // Vertex v becomes perm[v].
    Graph relabel(std::span<const Vertex> perm) const;

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.directed_ == b.directed_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_ = 0;
    bool directed_ = false;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_offsets_;
    std::vector<Vertex> out_targets_;
    std::vector<std::size_t> in_offsets_;
    std::vector<Vertex> in_sources_;
    std::vector<std::size_t> in_edge_ids_;
    std::vector<std::size_t> out_edge_ids_;
};

// Cartesian product: vertex (a, b) has index a * g2.n() + b; an edge changes
// exactly one coordinate along an edge of that factor.
Graph cartesian_product(const Graph& g1, const Graph& g2);

inline Vertex product_vertex(Vertex a, Vertex b, std::size_t n2) { return a * n2 + b; }

enum class Family { cycle, complete, hypercube, petersen, circulant, product };

struct CayleySpec {
    Family kind = Family::cycle;
    // n for cycle/complete/circulant, dimension for hypercube.
    std::size_t size = 0;
    std::vector<std::size_t> connections;  // circulant only
    bool directed = false;                  // circulant only
    std::vector<CayleySpec> factors;        // product only

    static CayleySpec cycle(std::size_t n);
    static CayleySpec complete(std::size_t n);
    static CayleySpec hypercube(std::size_t dim);
    static CayleySpec petersen();
    static CayleySpec circulant(std::size_t n, std::vector<std::size_t> s, bool directed = false);
    static CayleySpec product(CayleySpec a, CayleySpec b);
};

// Undirected circulants close S under negation before building.
Graph build_family(const CayleySpec& spec);

// "cycle(5)", "product(cycle(5),complete(2))", "circulant(9;1,2)".
std::string describe(const CayleySpec& spec);

// Parses the token form used on the command line, e.g.
// {"product", "cycle", "5", "complete", "2"} or {"circulant", "9", "1,2"}.
// The string overload also takes the describe() form.
// Throws InvalidArgument on malformed or trailing tokens.
CayleySpec parse_family(std::span<const std::string> tokens);
CayleySpec parse_family(const std::string& text);

struct GraphMetrics {
    std::optional<std::size_t> degree;                  // nullopt: irregular
    std::optional<std::size_t> diameter;                // nullopt: not strongly connected
    std::vector<std::optional<std::size_t>> eccentricity;

    bool regular() const { return degree.has_value(); }
    bool connected() const { return diameter.has_value(); }
};

// Hop counts from source along edge directions; kUnreachable where none.
std::vector<std::size_t> bfs_distances(const Graph& g, Vertex source);
// Hop counts from every vertex to target.
std::vector<std::size_t> bfs_distances_to(const Graph& g, Vertex target);

GraphMetrics metrics(const Graph& g);

// (j, k) -> number of 2-paths j -> i -> k, for every pair at distance exactly 2.
using Distance2Table = std::map<std::pair<Vertex, Vertex>, std::size_t>;

Distance2Table distance2_table(const Graph& g);

}  // namespace gsum
