#include "gsum/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "gsum/error.hpp"

namespace gsum {

Schedule hoffman_schedule(GraphPtr g, std::span<const double> lambdas, double scale) {
    Schedule s;
    s.graph = g;
    for (double lambda : lambdas) s.steps.push_back(StepMatrix::shifted_adjacency(g, lambda));
    s.final_scale = scale;
    return s;
}

Schedule hoffman_protocol(GraphPtr g, const Spectrum& spec) {
    const auto degree = g->regular_degree();
    if (!degree) throw PreconditionError("eigenvalue schedule needs a regular graph");
    if (spec.n != g->n()) throw InvalidArgument("spectrum does not belong to this graph");
    const HoffmanFactors factors = hoffman_factors(spec);
    const auto order = leja_order(factors.lambdas, spec.degree);
    return hoffman_schedule(std::move(g), order, factors.scale);
}

Protocol hoffman_round_protocol(GraphPtr g, const Spectrum& spec) {
    Protocol p = schedule_protocol(hoffman_protocol(std::move(g), spec));
    p.name = "hoffman";
    p.theorem = "eigenvalue factor schedule: rounds = distinct eigenvalues - 1";
    return p;
}

namespace {

constexpr double kExactRelTol = 1e-9;

// Tree protocol state: own value, partial sum of the subtree, broadcast total.
enum TreeSlot : std::size_t { tree_own = 0, tree_partial = 1, tree_total = 2 };

}  // namespace

Protocol tree_protocol(GraphPtr g, Vertex root) {
    const std::size_t n = g->n();
    if (root >= n) throw InvalidArgument("root " + std::to_string(root) + " is not a vertex");
    const auto depth_in = bfs_distances_to(*g, root);
    const auto depth_out = bfs_distances(*g, root);
    for (Vertex v = 0; v < n; ++v) {
        if (depth_in[v] == kUnreachable || depth_out[v] == kUnreachable) {
            throw PreconditionError("vertex " + std::to_string(v) + " is not strongly connected to root " +
                                    std::to_string(root));
        }
    }
    const std::size_t gather = *std::max_element(depth_in.begin(), depth_in.end());
    const std::size_t broadcast = *std::max_element(depth_out.begin(), depth_out.end());

    struct Plan {
        std::vector<std::size_t> depth_in, depth_out;
        std::vector<Vertex> up;                      // in-tree parent
        std::vector<Vertex> down_parent;             // out-tree parent
        std::vector<std::vector<Vertex>> down;       // out-tree children
        std::size_t gather = 0;
        Vertex root = 0;
    };
    auto plan = std::make_shared<Plan>();
    plan->depth_in = depth_in;
    plan->depth_out = depth_out;
    plan->up.assign(n, root);
    plan->down_parent.assign(n, root);
    plan->down.resize(n);
    plan->gather = gather;
    plan->root = root;
    for (Vertex v = 0; v < n; ++v) {
        if (v == root) continue;
        for (Vertex p : g->out_neighbors(v)) {
            if (depth_in[p] + 1 == depth_in[v]) {
                plan->up[v] = p;
                break;
            }
        }
        for (Vertex p : g->in_neighbors(v)) {
            if (depth_out[p] + 1 == depth_out[v]) {
                plan->down_parent[v] = p;
                plan->down[p].push_back(v);
                break;
            }
        }
    }

    Protocol p;
    p.name = "tree";
    p.theorem = "gather/broadcast on BFS trees: rounds = 2 ecc(root) <= 2D";
    p.graph = g;
    p.rounds = gather + broadcast;
    p.init = [plan](Vertex v, double x) {
        const bool done = v == plan->root && plan->gather == 0;
        return VertexState{x, x, done ? x : 0.0};
    };
    p.emit = [plan](std::size_t round, Vertex v, const VertexState& s, Outbox& out) {
        if (round <= plan->gather) {
            if (v != plan->root && plan->gather - plan->depth_in[v] + 1 == round) {
                out.send(plan->up[v], s[tree_partial]);
            }
            return;
        }
        if (plan->depth_out[v] + plan->gather + 1 == round) {
            for (Vertex child : plan->down[v]) out.send(child, s[tree_total]);
        }
    };
    p.absorb = [plan](std::size_t round, Vertex v, VertexState& s, const Inbox& in) {
        if (round <= plan->gather) {
            s[tree_partial] += in.total();
            if (v == plan->root && round == plan->gather) s[tree_total] = s[tree_partial];
            return;
        }
        if (v != plan->root) {
            if (auto value = in.from(plan->down_parent[v])) s[tree_total] = *value;
        }
    };
    p.finalize = [](Vertex, const VertexState& s) { return s[tree_total]; };
    return p;
}

Protocol diameter2_protocol(GraphPtr g) {
    const GraphMetrics gm = metrics(*g);
    if (!gm.connected()) throw PreconditionError("diameter-2 protocol refused: graph is not strongly connected");
    if (*gm.diameter > 2) {
        throw PreconditionError("diameter-2 protocol refused: measured diameter D = " +
                                std::to_string(*gm.diameter));
    }
    const Distance2Table table = distance2_table(*g);
    const std::size_t n = g->n();

    struct Share {
        std::size_t slot;  // index of j among in_neighbors(i)
        double weight;     // 1 / n(j, k)
    };
    // plan[i][t]: shares i forwards to its t-th out-neighbour.
    auto plan = std::make_shared<std::vector<std::vector<std::vector<Share>>>>(n);
    for (Vertex i = 0; i < n; ++i) {
        auto sources = g->in_neighbors(i);
        for (Vertex k : g->out_neighbors(i)) {
            std::vector<Share> shares;
            for (std::size_t slot = 0; slot < sources.size(); ++slot) {
                auto it = table.find({sources[slot], k});
                if (it != table.end()) shares.push_back({slot, 1.0 / static_cast<double>(it->second)});
            }
            (*plan)[i].push_back(std::move(shares));
        }
    }

    namespace slot = diameter2_slot;
    Protocol p;
    p.name = "diam2";
    p.theorem = "distance-2 sums in two rounds: diameter-2 graphs are sum optimal";
    p.graph = g;
    p.rounds = 2;
    p.init = [g](Vertex v, double x) {
        VertexState s(slot::remembered + g->in_degree(v), 0.0);
        s[slot::own] = x;
        return s;
    };
    p.emit = [g, plan](std::size_t round, Vertex v, const VertexState& s, Outbox& out) {
        auto targets = g->out_neighbors(v);
        for (std::size_t t = 0; t < targets.size(); ++t) {
            if (round == 1) {
                out.send(targets[t], s[slot::own]);
                continue;
            }
            const auto& shares = (*plan)[v][t];
            if (shares.empty()) continue;
            double value = 0.0;
            for (const Share& share : shares) value += share.weight * s[slot::remembered + share.slot];
            out.send(targets[t], value);
        }
    };
    p.absorb = [g](std::size_t round, Vertex v, VertexState& s, const Inbox& in) {
        if (round == 2) {
            s[slot::second_round] = in.total();
            return;
        }
        s[slot::first_round] = in.total();
        auto sources = g->in_neighbors(v);
        for (std::size_t k = 0; k < sources.size(); ++k) {
            s[slot::remembered + k] = in.from(sources[k]).value_or(0.0);
        }
    };
    p.finalize = [](Vertex, const VertexState& s) {
        return s[slot::own] + s[slot::first_round] + s[slot::second_round];
    };
    return p;
}

namespace {

void require_exact(const Protocol& p, const char* which) {
    const std::size_t n = p.graph->n();
    std::vector<std::vector<double>> probes{std::vector<double>(n, 1.0), uniform_input(n, 0x5eedULL)};
    for (const auto& x : probes) {
        const ProtocolResult r = run_protocol(p, x);
        if (!(r.max_rel_error <= kExactRelTol)) {
            throw PreconditionError(std::string(which) + " factor protocol '" + p.name +
                                    "' does not return the global sum (relative error " +
                                    std::to_string(r.max_rel_error) + ")");
        }
    }
}

// Forwards a factor protocol's sends to its copy inside the product graph.
class FiberOutbox final : public Outbox {
public:
    FiberOutbox(Outbox& base, Vertex fixed, std::size_t n2, bool first)
        : base_(base), fixed_(fixed), n2_(n2), first_(first) {}

    void send(Vertex to, double value) override {
        base_.send(first_ ? product_vertex(to, fixed_, n2_) : product_vertex(fixed_, to, n2_), value);
    }

private:
    Outbox& base_;
    Vertex fixed_;
    std::size_t n2_;
    bool first_;
};

}  // namespace

Protocol product_protocol(const Protocol& p1, const Protocol& p2) {
    if (!p1.graph || !p2.graph) throw InvalidArgument("factor protocol without a graph");
    require_exact(p1, "first");
    require_exact(p2, "second");
    const std::size_t n2 = p2.graph->n();
    const std::size_t r1 = p1.rounds;

    Protocol p;
    p.name = "product(" + p1.name + "," + p2.name + ")";
    p.theorem = "fiberwise composition: rounds add, sum-optimal factors give a sum-optimal product";
    p.graph = share(cartesian_product(*p1.graph, *p2.graph));
    p.rounds = p1.rounds + p2.rounds;

    // The state holds the first factor's state during phase 1 and the second's after.
    auto enter_phase2 = [p1, p2, n2](Vertex v, const VertexState& s1) {
        const Vertex a = v / n2, b = v % n2;
        return p2.init(b, p1.finalize(a, s1));
    };
    p.init = [p1, r1, n2, enter_phase2](Vertex v, double x) {
        VertexState s = p1.init(v / n2, x);
        return r1 == 0 ? enter_phase2(v, s) : s;
    };
    p.emit = [p1, p2, r1, n2](std::size_t round, Vertex v, const VertexState& s, Outbox& out) {
        const Vertex a = v / n2, b = v % n2;
        if (round <= r1) {
            FiberOutbox fiber(out, b, n2, true);
            p1.emit(round, a, s, fiber);
        } else {
            FiberOutbox fiber(out, a, n2, false);
            p2.emit(round - r1, b, s, fiber);
        }
    };
    p.absorb = [p1, p2, r1, n2, enter_phase2](std::size_t round, Vertex v, VertexState& s, const Inbox& in) {
        const Vertex a = v / n2, b = v % n2;
        std::vector<Message> local;
        for (const Message& m : in.messages) {
            const Vertex ma = m.from / n2, mb = m.from % n2;
            if (round <= r1 && mb == b) local.push_back({ma, m.value});
            if (round > r1 && ma == a) local.push_back({mb, m.value});
        }
        if (round <= r1) {
            p1.absorb(round, a, s, Inbox{local});
            if (round == r1) s = enter_phase2(v, s);
        } else {
            p2.absorb(round - r1, b, s, Inbox{local});
        }
    };
    p.finalize = [p2, n2](Vertex v, const VertexState& s) { return p2.finalize(v % n2, s); };
    // Before the switch the state belongs to p1, so traces report the raw slot 0.
    p.observe = [](Vertex, const VertexState& s) { return s.empty() ? 0.0 : s.front(); };
    return p;
}

namespace {

// Approximate-mean state: input, previous and current recurrence vectors.
enum ApproxSlot : std::size_t { approx_x = 0, approx_prev = 1, approx_cur = 2 };

}  // namespace

ApproxMeanProtocol approx_mean_protocol(GraphPtr g, const Spectrum& spec, std::size_t m) {
    if (spec.n != g->n()) throw InvalidArgument("spectrum does not belong to this graph");
    if (!g->regular_degree()) throw PreconditionError("approximate mean needs a regular graph");
    ApproxMeanProtocol out;
    out.polynomial = chebyshev_polynomial(spec, m);
    out.certificate = offdiagonal_norm(out.polynomial, spec);
    out.certified = spec.n > 1 && certifies(out.certificate, spec.n);

    const double d = spec.degree;
    const double n = static_cast<double>(spec.n);
    const Polynomial poly = out.polynomial;
    const bool chebyshev = poly.form() == Polynomial::Form::chebyshev && m > 0;
    double alpha = 0.0, beta = 0.0, normaliser = 1.0;
    if (chebyshev) {
        const double a = poly.lower(), b = poly.upper();
        alpha = 2.0 / (b - a);
        beta = -(a + b) / (b - a);
        // T_m(beta)
        double q0 = 1.0, q1 = beta;
        for (std::size_t k = 1; k < m; ++k) {
            const double q2 = 2.0 * beta * q1 - q0;
            q0 = q1;
            q1 = q2;
        }
        normaliser = q1;
    }
    const double root = poly.form() == Polynomial::Form::linear_power ? poly.root() : 0.0;

    Protocol& p = out.protocol;
    p.name = "approx";
    p.theorem = "polynomial mean estimate: ||y - mean|| <= eps ||x||, certified when eps < 1/(n-1)";
    p.graph = g;
    p.rounds = m;
    p.init = [](Vertex, double x) { return VertexState{x, 0.0, x}; };
    p.emit = [g](std::size_t, Vertex v, const VertexState& s, Outbox& out_box) {
        for (Vertex w : g->out_neighbors(v)) out_box.send(w, s[approx_cur]);
    };
    p.absorb = [=](std::size_t round, Vertex, VertexState& s, const Inbox& in) {
        // (A - dI) applied to the current vector, at this vertex.
        const double shifted = in.total() - d * s[approx_cur];
        double next = 0.0;
        if (chebyshev) {
            const double mapped = alpha * shifted + beta * s[approx_cur];
            next = round == 1 ? mapped : 2.0 * mapped - s[approx_prev];
        } else {
            next = s[approx_cur] - shifted / root;
        }
        s[approx_prev] = s[approx_cur];
        s[approx_cur] = next;
    };
    p.finalize = [n, normaliser](Vertex, const VertexState& s) { return n * s[approx_cur] / normaliser; };
    p.observe = [](Vertex, const VertexState& s) { return s[approx_cur]; };
    return out;
}

ApproxMeanReport run_approx_mean(const ApproxMeanProtocol& p, std::span<const double> x, RunOptions options) {
    ApproxMeanReport report;
    report.result = run_protocol(p.protocol, x, options);
    const double n = static_cast<double>(x.size());
    report.mean = report.result.mean;
    report.y.reserve(x.size());
    double dev2 = 0.0, x2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double yi = report.result.values[i] / n;
        report.y.push_back(yi);
        dev2 += (yi - report.mean) * (yi - report.mean);
        x2 += x[i] * x[i];
    }
    report.deviation = std::sqrt(dev2);
    report.input_norm = std::sqrt(x2);
    report.certificate = p.certificate;
    report.certified = p.certified;
    // Relative slack for rounding in the recurrence.
    report.bound_holds = report.deviation <= p.certificate * report.input_norm * (1.0 + 1e-9) + 1e-12 * report.input_norm;
    return report;
}

}  // namespace gsum
