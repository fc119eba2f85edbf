#include "gsum/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

#include "gsum/error.hpp"

namespace gsum {

Graph::Graph(std::size_t n, std::vector<Edge> edges, bool directed) : n_(n), directed_(directed) {
    if (n == 0) throw InvalidArgument("graph must have at least one vertex");
    for (const Edge& e : edges) {
        if (e.from >= n || e.to >= n) {
            throw InvalidArgument("edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                                  ") references a vertex >= n = " + std::to_string(n));
        }
        if (e.from == e.to) {
            throw InvalidArgument("self-loop at vertex " + std::to_string(e.from));
        }
    }
    if (!directed) {
        const std::size_t count = edges.size();
        for (std::size_t i = 0; i < count; ++i) edges.push_back({edges[i].to, edges[i].from});
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    for (const Edge& e : edges_) {
        ++out_offsets_[e.from + 1];
        ++in_offsets_[e.to + 1];
    }
    for (std::size_t v = 0; v < n; ++v) {
        out_offsets_[v + 1] += out_offsets_[v];
        in_offsets_[v + 1] += in_offsets_[v];
    }
    out_targets_.resize(edges_.size());
    out_edge_ids_.resize(edges_.size());
    in_sources_.resize(edges_.size());
    in_edge_ids_.resize(edges_.size());
    // Edges are sorted by source, so the out lists fill in order and each in
    // list receives its sources in increasing order.
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::size_t id = 0; id < edges_.size(); ++id) {
        const Edge& e = edges_[id];
        out_targets_[id] = e.to;
        out_edge_ids_[id] = id;
        const std::size_t slot = in_fill[e.to]++;
        in_sources_[slot] = e.from;
        in_edge_ids_[slot] = id;
    }
}

std::span<const Vertex> Graph::out_neighbors(Vertex v) const {
    return {out_targets_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
}

std::span<const Vertex> Graph::in_neighbors(Vertex v) const {
    return {in_sources_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
}

std::span<const std::size_t> Graph::in_edges(Vertex v) const {
    return {in_edge_ids_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
}

std::span<const std::size_t> Graph::out_edges(Vertex v) const {
    return {out_edge_ids_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
}

std::optional<std::size_t> Graph::edge_id(Vertex from, Vertex to) const {
    if (from >= n_ || to >= n_) return std::nullopt;
    auto targets = out_neighbors(from);
    auto it = std::lower_bound(targets.begin(), targets.end(), to);
    if (it == targets.end() || *it != to) return std::nullopt;
    return out_offsets_[from] + static_cast<std::size_t>(it - targets.begin());
}

std::optional<std::size_t> Graph::regular_degree() const {
    const std::size_t d = out_degree(0);
    for (Vertex v = 0; v < n_; ++v) {
        if (out_degree(v) != d || in_degree(v) != d) return std::nullopt;
    }
    return d;
}

bool Graph::symmetric() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [this](const Edge& e) { return has_edge(e.to, e.from); });
}

Eigen::MatrixXd Graph::adjacency() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                              static_cast<Eigen::Index>(n_));
    for (const Edge& e : edges_) {
        a(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) = 1.0;
    }
    return a;
}

std::optional<std::vector<std::size_t>> Graph::circulant_connections() const {
    for (const Edge& e : edges_) {
        if (!has_edge((e.from + 1) % n_, (e.to + 1) % n_)) return std::nullopt;
    }
    auto targets = out_neighbors(0);
    return std::vector<std::size_t>(targets.begin(), targets.end());
}

Graph Graph::relabel(std::span<const Vertex> perm) const {
    if (perm.size() != n_) throw InvalidArgument("permutation length differs from vertex count");
    std::vector<bool> seen(n_, false);
    for (Vertex p : perm) {
        if (p >= n_ || seen[p]) throw InvalidArgument("relabel argument is not a permutation");
        seen[p] = true;
    }
    std::vector<Edge> mapped;
    mapped.reserve(edges_.size());
    for (const Edge& e : edges_) mapped.push_back({perm[e.from], perm[e.to]});
    return Graph(n_, std::move(mapped), directed_);
}

Graph cartesian_product(const Graph& g1, const Graph& g2) {
    const std::size_t n1 = g1.n();
    const std::size_t n2 = g2.n();
    std::vector<Edge> edges;
    edges.reserve(g1.edge_count() * n2 + g2.edge_count() * n1);
    for (Vertex b = 0; b < n2; ++b) {
        for (const Edge& e : g1.edges()) {
            edges.push_back({product_vertex(e.from, b, n2), product_vertex(e.to, b, n2)});
        }
    }
    for (Vertex a = 0; a < n1; ++a) {
        for (const Edge& e : g2.edges()) {
            edges.push_back({product_vertex(a, e.from, n2), product_vertex(a, e.to, n2)});
        }
    }
    return Graph(n1 * n2, std::move(edges), g1.directed() || g2.directed());
}

CayleySpec CayleySpec::cycle(std::size_t n) {
    CayleySpec s;
    s.kind = Family::cycle;
    s.size = n;
    return s;
}

CayleySpec CayleySpec::complete(std::size_t n) {
    CayleySpec s;
    s.kind = Family::complete;
    s.size = n;
    return s;
}

CayleySpec CayleySpec::hypercube(std::size_t dim) {
    CayleySpec s;
    s.kind = Family::hypercube;
    s.size = dim;
    return s;
}

CayleySpec CayleySpec::petersen() {
    CayleySpec s;
    s.kind = Family::petersen;
    s.size = 10;
    return s;
}

CayleySpec CayleySpec::circulant(std::size_t n, std::vector<std::size_t> connections, bool directed) {
    CayleySpec s;
    s.kind = Family::circulant;
    s.size = n;
    s.connections = std::move(connections);
    s.directed = directed;
    return s;
}

CayleySpec CayleySpec::product(CayleySpec a, CayleySpec b) {
    CayleySpec s;
    s.kind = Family::product;
    s.factors = {std::move(a), std::move(b)};
    return s;
}

namespace {

Graph circulant_graph(std::size_t n, const std::vector<std::size_t>& connections, bool directed) {
    std::vector<Edge> edges;
    for (Vertex v = 0; v < n; ++v) {
        for (std::size_t s : connections) edges.push_back({v, (v + s) % n});
    }
    return Graph(n, std::move(edges), directed);
}

Graph petersen_graph() {
    // Kneser K(5,2): 2-subsets of {0..4} in lexicographic order, adjacent iff disjoint.
    std::vector<std::pair<int, int>> subsets;
    for (int a = 0; a < 5; ++a) {
        for (int b = a + 1; b < 5; ++b) subsets.emplace_back(a, b);
    }
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < subsets.size(); ++u) {
        for (std::size_t v = 0; v < subsets.size(); ++v) {
            const auto [a, b] = subsets[u];
            const auto [c, d] = subsets[v];
            if (a != c && a != d && b != c && b != d) edges.push_back({u, v});
        }
    }
    return Graph(subsets.size(), std::move(edges), false);
}

}  // namespace

Graph build_family(const CayleySpec& spec) {
    switch (spec.kind) {
        case Family::cycle:
            if (spec.size < 2) throw InvalidArgument("cycle needs n >= 2");
            return circulant_graph(spec.size, {1, spec.size - 1}, false);
        case Family::complete: {
            if (spec.size < 2) throw InvalidArgument("complete graph needs n >= 2");
            std::vector<std::size_t> all;
            for (std::size_t s = 1; s < spec.size; ++s) all.push_back(s);
            return circulant_graph(spec.size, all, false);
        }
        case Family::hypercube: {
            if (spec.size < 1) throw InvalidArgument("hypercube needs dimension >= 1");
            if (spec.size > 20) throw InvalidArgument("hypercube dimension too large");
            const std::size_t n = std::size_t{1} << spec.size;
            std::vector<Edge> edges;
            for (Vertex v = 0; v < n; ++v) {
                for (std::size_t bit = 0; bit < spec.size; ++bit) edges.push_back({v, v ^ (std::size_t{1} << bit)});
            }
            return Graph(n, std::move(edges), false);
        }
        case Family::petersen:
            return petersen_graph();
        case Family::circulant: {
            const std::size_t n = spec.size;
            if (n < 2) throw InvalidArgument("circulant needs n >= 2");
            if (spec.connections.empty()) throw InvalidArgument("empty generating set");
            std::vector<std::size_t> s = spec.connections;
            for (std::size_t x : s) {
                if (x == 0 || x >= n) {
                    throw InvalidArgument("circulant connection " + std::to_string(x) +
                                          " outside 1.." + std::to_string(n - 1));
                }
            }
            if (!spec.directed) {
                const std::size_t count = s.size();
                for (std::size_t i = 0; i < count; ++i) s.push_back(n - s[i]);
            }
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            return circulant_graph(n, s, spec.directed);
        }
        case Family::product:
            if (spec.factors.size() != 2) throw InvalidArgument("product needs exactly two factors");
            return cartesian_product(build_family(spec.factors[0]), build_family(spec.factors[1]));
    }
    throw InvalidArgument("unknown family");
}

std::string describe(const CayleySpec& spec) {
    switch (spec.kind) {
        case Family::cycle:
            return "cycle(" + std::to_string(spec.size) + ")";
        case Family::complete:
            return "complete(" + std::to_string(spec.size) + ")";
        case Family::hypercube:
            return "hypercube(" + std::to_string(spec.size) + ")";
        case Family::petersen:
            return "petersen";
        case Family::circulant: {
            std::string out = spec.directed ? "dcirculant(" : "circulant(";
            out += std::to_string(spec.size) + ";";
            for (std::size_t i = 0; i < spec.connections.size(); ++i) {
                if (i) out += ",";
                out += std::to_string(spec.connections[i]);
            }
            return out + ")";
        }
        case Family::product:
            return "product(" + describe(spec.factors.at(0)) + "," + describe(spec.factors.at(1)) + ")";
    }
    return "?";
}

namespace {

std::size_t parse_count(const std::string& token, const char* what) {
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(token, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != token.size() || token.front() == '-') {
        throw InvalidArgument(std::string("expected a non-negative integer for ") + what + ", got '" +
                              token + "'");
    }
    return static_cast<std::size_t>(value);
}

CayleySpec parse_one(std::span<const std::string> tokens, std::size_t& pos) {
    auto next = [&](const char* what) -> const std::string& {
        if (pos >= tokens.size()) throw InvalidArgument(std::string("missing ") + what);
        return tokens[pos++];
    };
    const std::string kind = next("family name");
    if (kind == "cycle") return CayleySpec::cycle(parse_count(next("n"), "n"));
    if (kind == "complete") return CayleySpec::complete(parse_count(next("n"), "n"));
    if (kind == "hypercube") return CayleySpec::hypercube(parse_count(next("dimension"), "dimension"));
    if (kind == "petersen") return CayleySpec::petersen();
    if (kind == "circulant" || kind == "dcirculant") {
        const std::size_t n = parse_count(next("n"), "n");
        std::vector<std::size_t> s;
        std::stringstream list(next("connection set"));
        std::string item;
        while (std::getline(list, item, ',')) s.push_back(parse_count(item, "connection"));
        if (s.empty()) throw InvalidArgument("empty generating set");
        return CayleySpec::circulant(n, std::move(s), kind == "dcirculant");
    }
    if (kind == "product") {
        CayleySpec a = parse_one(tokens, pos);
        CayleySpec b = parse_one(tokens, pos);
        return CayleySpec::product(std::move(a), std::move(b));
    }
    throw InvalidArgument("unknown family '" + kind + "'");
}

}  // namespace

CayleySpec parse_family(std::span<const std::string> tokens) {
    std::size_t pos = 0;
    CayleySpec spec = parse_one(tokens, pos);
    if (pos != tokens.size()) throw InvalidArgument("unexpected token '" + tokens[pos] + "'");
    return spec;
}

namespace {

// "product(cycle(5),circulant(9;1,2))" -> product cycle 5 circulant 9 1,2
std::vector<std::string> described_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ')') {
            ++i;
            continue;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) throw InvalidArgument("unexpected '" + std::string(1, c) + "' in family name");
        std::size_t end = i;
        while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) ++end;
        const std::string name = text.substr(i, end - i);
        tokens.push_back(name);
        i = end;
        if (i >= text.size() || text[i] != '(') continue;
        ++i;
        if (name == "product") continue;
        const std::size_t close = text.find(')', i);
        if (close == std::string::npos) throw InvalidArgument("unbalanced parentheses in '" + text + "'");
        std::stringstream args(text.substr(i, close - i));
        for (std::string part; std::getline(args, part, ';');) tokens.push_back(part);
        i = close + 1;
    }
    return tokens;
}

}  // namespace

CayleySpec parse_family(const std::string& text) {
    std::vector<std::string> tokens;
    if (text.find('(') != std::string::npos) {
        tokens = described_tokens(text);
    } else {
        std::stringstream in(text);
        for (std::string token; in >> token;) tokens.push_back(token);
    }
    return parse_family(std::span<const std::string>(tokens));
}

namespace {

template <typename Neighbors>
std::vector<std::size_t> bfs(std::size_t n, Vertex source, Neighbors&& neighbors) {
    std::vector<std::size_t> dist(n, kUnreachable);
    std::deque<Vertex> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        const Vertex v = queue.front();
        queue.pop_front();
        for (Vertex w : neighbors(v)) {
            if (dist[w] == kUnreachable) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<std::size_t> bfs_distances(const Graph& g, Vertex source) {
    return bfs(g.n(), source, [&](Vertex v) { return g.out_neighbors(v); });
}

std::vector<std::size_t> bfs_distances_to(const Graph& g, Vertex target) {
    return bfs(g.n(), target, [&](Vertex v) { return g.in_neighbors(v); });
}

GraphMetrics metrics(const Graph& g) {
    GraphMetrics out;
    out.degree = g.regular_degree();
    out.eccentricity.resize(g.n());
    bool connected = true;
    std::size_t diameter = 0;
    for (Vertex v = 0; v < g.n(); ++v) {
        const auto dist = bfs_distances(g, v);
        const std::size_t ecc = *std::max_element(dist.begin(), dist.end());
        if (ecc == kUnreachable) {
            connected = false;
            continue;
        }
        out.eccentricity[v] = ecc;
        diameter = std::max(diameter, ecc);
    }
    if (connected) out.diameter = diameter;
    return out;
}

Distance2Table distance2_table(const Graph& g) {
    Distance2Table table;
    std::vector<std::size_t> count(g.n(), 0);
    for (Vertex j = 0; j < g.n(); ++j) {
        std::fill(count.begin(), count.end(), 0);
        for (Vertex i : g.out_neighbors(j)) {
            for (Vertex k : g.out_neighbors(i)) ++count[k];
        }
        for (Vertex k = 0; k < g.n(); ++k) {
            if (count[k] > 0 && k != j && !g.has_edge(j, k)) table[{j, k}] = count[k];
        }
    }
    return table;
}

}  // namespace gsum
