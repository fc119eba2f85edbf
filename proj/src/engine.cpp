#include "gsum/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "gsum/error.hpp"

namespace gsum {

StepMatrix::StepMatrix(GraphPtr g)
    : graph_(std::move(g)), diagonal_(graph_->n(), 0.0), edge_weights_(graph_->edge_count(), 0.0) {}

StepMatrix::StepMatrix(GraphPtr g, std::vector<double> diagonal, std::vector<double> edge_weights)
    : graph_(std::move(g)), diagonal_(std::move(diagonal)), edge_weights_(std::move(edge_weights)) {
    if (diagonal_.size() != graph_->n() || edge_weights_.size() != graph_->edge_count()) {
        throw InvalidArgument("step matrix weights do not match the graph");
    }
}

StepMatrix StepMatrix::identity(GraphPtr g) {
    StepMatrix w(std::move(g));
    std::fill(w.diagonal_.begin(), w.diagonal_.end(), 1.0);
    return w;
}

StepMatrix StepMatrix::shifted_adjacency(GraphPtr g, double shift, double scale) {
    StepMatrix w(std::move(g));
    std::fill(w.diagonal_.begin(), w.diagonal_.end(), -shift * scale);
    std::fill(w.edge_weights_.begin(), w.edge_weights_.end(), scale);
    return w;
}

StepMatrix StepMatrix::from_dense(GraphPtr g, const Eigen::MatrixXd& w) {
    const StepValidation check = validate_step(*g, w);
    if (!check.ok()) {
        const auto& v = check.violations.front();
        throw InvalidArgument("entry (" + std::to_string(v.row) + ", " + std::to_string(v.col) +
                              ") lies off the adjacency-plus-diagonal support (" +
                              std::to_string(check.violations.size()) + " violations)");
    }
    StepMatrix out(std::move(g));
    const Graph& graph = *out.graph_;
    for (Vertex v = 0; v < graph.n(); ++v) {
        out.diagonal_[v] = w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v));
    }
    for (std::size_t id = 0; id < graph.edge_count(); ++id) {
        const Edge& e = graph.edges()[id];
        out.edge_weights_[id] = w(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from));
    }
    return out;
}

double StepMatrix::coefficient(Vertex u, Vertex v) const {
    if (u == v) return diagonal_[u];
    const auto id = graph_->edge_id(v, u);
    return id ? edge_weights_[*id] : 0.0;
}

Eigen::MatrixXd StepMatrix::dense() const {
    const auto n = static_cast<Eigen::Index>(graph_->n());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Vertex v = 0; v < graph_->n(); ++v) {
        w(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)) = diagonal_[v];
    }
    for (std::size_t id = 0; id < graph_->edge_count(); ++id) {
        const Edge& e = graph_->edges()[id];
        w(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) = edge_weights_[id];
    }
    return w;
}

Eigen::MatrixXd StepMatrix::apply(const Eigen::MatrixXd& x) const {
    const Graph& g = *graph_;
    if (static_cast<std::size_t>(x.rows()) != g.n()) throw InvalidArgument("operand has the wrong number of rows");
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Vertex u = 0; u < g.n(); ++u) {
        const auto row = static_cast<Eigen::Index>(u);
        out.row(row) = diagonal_[u] * x.row(row);
        auto sources = g.in_neighbors(u);
        auto ids = g.in_edges(u);
        for (std::size_t k = 0; k < sources.size(); ++k) {
            out.row(row) += edge_weights_[ids[k]] * x.row(static_cast<Eigen::Index>(sources[k]));
        }
    }
    return out;
}

StepMatrix StepMatrix::scaled(double factor) const {
    StepMatrix out = *this;
    for (double& x : out.diagonal_) x *= factor;
    for (double& x : out.edge_weights_) x *= factor;
    return out;
}

StepValidation validate_step(const Graph& g, const Eigen::MatrixXd& w) {
    const auto n = static_cast<Eigen::Index>(g.n());
    if (w.rows() != n || w.cols() != n) {
        throw InvalidArgument("step matrix is " + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                              ", graph has " + std::to_string(g.n()) + " vertices");
    }
    StepValidation out;
    for (Eigen::Index u = 0; u < n; ++u) {
        for (Eigen::Index v = 0; v < n; ++v) {
            const double value = w(u, v);
            if (value == 0.0 || u == v) continue;
            if (!g.has_edge(static_cast<Vertex>(v), static_cast<Vertex>(u))) {
                out.violations.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v), value});
            }
        }
    }
    return out;
}

std::optional<double> Inbox::from(Vertex sender) const {
    auto it = std::lower_bound(messages.begin(), messages.end(), sender,
                               [](const Message& m, Vertex s) { return m.from < s; });
    if (it == messages.end() || it->from != sender) return std::nullopt;
    return it->value;
}

double Inbox::total() const {
    double acc = 0.0;
    for (const Message& m : messages) acc += m.value;
    return acc;
}

namespace {

// Message buffer with exactly one slot per directed edge.
class EdgeBuffer {
public:
    explicit EdgeBuffer(const Graph& g) : graph_(g), slots_(g.edge_count()) {}

    void clear() { std::fill(slots_.begin(), slots_.end(), std::nullopt); }

    void put(std::size_t round, Vertex from, Vertex to, double value) {
        const auto id = graph_.edge_id(from, to);
        if (!id) {
            throw ProtocolViolation("vertex " + std::to_string(from) + " sent to non-neighbour " +
                                        std::to_string(to),
                                    round);
        }
        if (slots_[*id]) {
            throw ProtocolViolation("second scalar on edge " + std::to_string(from) + " -> " +
                                        std::to_string(to),
                                    round);
        }
        slots_[*id] = value;
    }

    void collect(Vertex to, std::vector<Message>& out) const {
        out.clear();
        auto sources = graph_.in_neighbors(to);
        auto ids = graph_.in_edges(to);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (slots_[ids[i]]) out.push_back({sources[i], *slots_[ids[i]]});
        }
    }

private:
    const Graph& graph_;
    std::vector<std::optional<double>> slots_;
};

class BufferOutbox final : public Outbox {
public:
    BufferOutbox(EdgeBuffer& buffer, std::size_t round, Vertex from)
        : buffer_(buffer), round_(round), from_(from) {}

    void send(Vertex to, double value) override { buffer_.put(round_, from_, to, value); }

private:
    EdgeBuffer& buffer_;
    std::size_t round_;
    Vertex from_;
};

}  // namespace

ProtocolResult run_protocol(const Protocol& p, std::span<const double> x, RunOptions options) {
    if (!p.graph) throw InvalidArgument("protocol has no graph");
    const Graph& g = *p.graph;
    const std::size_t n = g.n();
    if (x.size() != n) {
        throw InvalidArgument("input has " + std::to_string(x.size()) + " values, graph has " +
                              std::to_string(n) + " vertices");
    }
    const auto& observe = p.observe ? p.observe : p.finalize;

    std::vector<VertexState> states(n);
    for (Vertex v = 0; v < n; ++v) states[v] = p.init(v, x[v]);

    ProtocolResult result;
    auto record = [&](std::size_t round) {
        std::vector<double> row(n);
        for (Vertex v = 0; v < n; ++v) {
            row[v] = observe(v, states[v]);
            if (!std::isfinite(row[v])) throw NonFiniteError(round, v);
        }
        if (options.trace) result.trace.push_back(std::move(row));
    };
    record(0);

    EdgeBuffer buffer(g);
    std::vector<Message> inbox;
    for (std::size_t round = 1; round <= p.rounds; ++round) {
        buffer.clear();
        for (Vertex v = 0; v < n; ++v) {
            BufferOutbox out(buffer, round, v);
            p.emit(round, v, states[v], out);
        }
        for (Vertex v = 0; v < n; ++v) {
            buffer.collect(v, inbox);
            p.absorb(round, v, states[v], Inbox{inbox});
        }
        record(round);
    }

    result.rounds = p.rounds;
    result.values.resize(n);
    for (Vertex v = 0; v < n; ++v) result.values[v] = p.finalize(v, states[v]);
    for (double xi : x) result.sum += xi;
    result.mean = result.sum / static_cast<double>(n);
    for (double value : result.values) {
        result.max_abs_error = std::max(result.max_abs_error, std::abs(value - result.sum));
    }
    result.max_rel_error = result.sum != 0.0 ? result.max_abs_error / std::abs(result.sum) : result.max_abs_error;
    result.final_states = std::move(states);
    return result;
}

ProtocolResult run_protocol(const Graph& g, const Protocol& p, std::span<const double> x, RunOptions options) {
    if (!p.graph || (p.graph.get() != &g && !(*p.graph == g))) {
        throw InvalidArgument("protocol '" + p.name + "' was built for a different graph");
    }
    return run_protocol(p, x, options);
}

Protocol schedule_protocol(const Schedule& schedule) {
    if (!schedule.graph) throw InvalidArgument("schedule has no graph");
    for (const StepMatrix& w : schedule.steps) {
        if (w.graph_ptr() != schedule.graph && !(w.graph() == *schedule.graph)) {
            throw InvalidArgument("schedule steps use different graphs");
        }
    }
    auto steps = std::make_shared<const std::vector<StepMatrix>>(schedule.steps);
    const double scale = schedule.final_scale.value_or(1.0);

    Protocol p;
    p.name = "linear-schedule";
    p.theorem = "linear mixing schedule";
    p.graph = schedule.graph;
    p.rounds = schedule.steps.size();
    p.init = [](Vertex, double x) { return VertexState{x}; };
    p.emit = [steps](std::size_t round, Vertex v, const VertexState& s, Outbox& out) {
        const StepMatrix& w = (*steps)[round - 1];
        const Graph& g = w.graph();
        auto targets = g.out_neighbors(v);
        auto ids = g.out_edges(v);
        for (std::size_t i = 0; i < ids.size(); ++i) out.send(targets[i], w.edge_weight(ids[i]) * s[0]);
    };
    p.absorb = [steps](std::size_t round, Vertex v, VertexState& s, const Inbox& in) {
        const StepMatrix& w = (*steps)[round - 1];
        s[0] = w.diagonal(v) * s[0] + in.total();
    };
    p.finalize = [scale](Vertex, const VertexState& s) { return scale * s[0]; };
    p.observe = [](Vertex, const VertexState& s) { return s[0]; };
    return p;
}

ProtocolResult run_linear_schedule(const Graph& g, const Schedule& schedule, std::span<const double> x,
                                   RunOptions options) {
    return run_protocol(g, schedule_protocol(schedule), x, options);
}

std::vector<double> uniform_input(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = dist(rng);
    return x;
}

std::vector<double> make_input(const std::string& spec, std::size_t n) {
    std::istringstream in(spec);
    std::string kind;
    in >> kind;
    if (kind == "ones") return std::vector<double>(n, 1.0);
    if (kind == "unit") {
        std::size_t k = 0;
        if (!(in >> k) || k >= n) throw InvalidArgument("unit input needs an index below " + std::to_string(n));
        std::vector<double> x(n, 0.0);
        x[k] = 1.0;
        return x;
    }
    if (kind == "uniform") {
        std::uint64_t seed = 0;
        if (!(in >> seed)) throw InvalidArgument("uniform input needs a seed");
        return uniform_input(n, seed);
    }
    if (kind == "file") {
        std::string path;
        std::getline(in >> std::ws, path);
        std::ifstream file(path);
        if (!file) throw Error("cannot open input file " + path);
        std::vector<double> x;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(file, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::istringstream fields(line);
            double value = 0.0;
            std::string rest;
            if (!(fields >> value) || (fields >> rest)) throw ParseError("expected one real value", line_no);
            x.push_back(value);
        }
        if (x.size() != n) {
            throw InvalidArgument("input file has " + std::to_string(x.size()) + " values, graph has " +
                                  std::to_string(n) + " vertices");
        }
        return x;
    }
    throw InvalidArgument("unknown input spec '" + spec + "' (ones | unit k | uniform seed | file path)");
}

}  // namespace gsum
