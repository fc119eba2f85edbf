#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsum/graph.hpp"

namespace gsum {

using GraphPtr = std::shared_ptr<const Graph>;

inline GraphPtr share(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

// One round of linear mixing: W(u, u) on the diagonal and W(u, v) on each
// edge v -> u. Nothing can be stored off that pattern.
class StepMatrix {
public:
    explicit StepMatrix(GraphPtr g);
    StepMatrix(GraphPtr g, std::vector<double> diagonal, std::vector<double> edge_weights);

    static StepMatrix identity(GraphPtr g);
    // scale * (A - shift * I)
    static StepMatrix shifted_adjacency(GraphPtr g, double shift, double scale = 1.0);
    // Throws InvalidArgument listing the first off-support entry.
    static StepMatrix from_dense(GraphPtr g, const Eigen::MatrixXd& w);

    const Graph& graph() const { return *graph_; }
    const GraphPtr& graph_ptr() const { return graph_; }

    std::span<const double> diagonal() const { return diagonal_; }
    std::span<const double> edge_weights() const { return edge_weights_; }
    double diagonal(Vertex v) const { return diagonal_[v]; }
    double edge_weight(std::size_t edge_id) const { return edge_weights_[edge_id]; }
    void set_diagonal(Vertex v, double w) { diagonal_[v] = w; }
    void set_edge_weight(std::size_t edge_id, double w) { edge_weights_[edge_id] = w; }

    // W(u, v); zero off the support.
    double coefficient(Vertex u, Vertex v) const;
    Eigen::MatrixXd dense() const;
    // W * x, touching only the support.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
    StepMatrix scaled(double factor) const;

private:
    GraphPtr graph_;
    std::vector<double> diagonal_;
    std::vector<double> edge_weights_;
};

struct SupportViolation {
    Vertex row = 0;
    Vertex col = 0;
    double value = 0.0;
};

struct StepValidation {
    std::vector<SupportViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Nonzero entries must sit on the diagonal or on (u, v) with v -> u an edge.
// Throws InvalidArgument when w is not n x n.
StepValidation validate_step(const Graph& g, const Eigen::MatrixXd& w);

struct Schedule {
    GraphPtr graph;
    std::vector<StepMatrix> steps;
    std::optional<double> final_scale;

    std::size_t rounds() const { return steps.size(); }
};

using VertexState = std::vector<double>;

struct Message {
    Vertex from = 0;
    double value = 0.0;
};

// Scalars delivered to one vertex in one round, ordered by sender.
struct Inbox {
    std::span<const Message> messages;

    std::optional<double> from(Vertex sender) const;
    double total() const;
};

class Outbox {
public:
    virtual ~Outbox() = default;
    // At most one scalar per out-edge per round; a second send on the same
    // edge or a send to a non-neighbour throws ProtocolViolation.
    virtual void send(Vertex to, double value) = 0;
};

// Round-based protocol. Rounds are numbered from 1. In each round every
// vertex emits from its pre-round state, then every vertex absorbs what it
// was sent. Local memory (VertexState) is unrestricted.
struct Protocol {
    std::string name;
    std::string theorem;  // what the construction guarantees
    GraphPtr graph;
    std::size_t rounds = 0;

    std::function<VertexState(Vertex, double)> init;
    std::function<void(std::size_t, Vertex, const VertexState&, Outbox&)> emit;
    std::function<void(std::size_t, Vertex, VertexState&, const Inbox&)> absorb;
    std::function<double(Vertex, const VertexState&)> finalize;
    // Per-round trace value; finalize is used when empty.
    std::function<double(Vertex, const VertexState&)> observe;
};

struct RunOptions {
    bool trace = false;
};

struct ProtocolResult {
    std::vector<double> values;
    std::size_t rounds = 0;
    double sum = 0.0;  // reference global sum of the input, summed in index order
    double mean = 0.0;
    double max_abs_error = 0.0;
    // max_abs_error / |sum|, or max_abs_error itself when the sum is zero.
    double max_rel_error = 0.0;
    // trace[r][v]: observed value of v after round r (row 0 is the input state).
    std::vector<std::vector<double>> trace;
    std::vector<VertexState> final_states;
};

// Throws ProtocolViolation on a non-edge send or a second scalar on one edge,
// NonFiniteError when an observed value stops being finite.
ProtocolResult run_protocol(const Protocol& p, std::span<const double> x, RunOptions options = {});
// Also checks that p was built for g.
ProtocolResult run_protocol(const Graph& g, const Protocol& p, std::span<const double> x,
                            RunOptions options = {});

// A linear schedule as a protocol: each vertex sends W(u, v) x_v along v -> u.
Protocol schedule_protocol(const Schedule& schedule);

ProtocolResult run_linear_schedule(const Graph& g, const Schedule& schedule, std::span<const double> x,
                                   RunOptions options = {});

// Input generators: "ones", "unit k", "uniform seed" (values in [0, 1)),
// "file path" (one real per line).
std::vector<double> make_input(const std::string& spec, std::size_t n);
std::vector<double> uniform_input(std::size_t n, std::uint64_t seed);

}  // namespace gsum
