#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gsum/engine.hpp"
#include "gsum/spectral.hpp"

namespace gsum {

// Linear schedule of the factors (A - lambda I) over the non-principal
// distinct eigenvalues, in Leja order, with final scale n / prod(d - lambda).
// Every vertex ends with the global sum after spec.m() rounds.
// Throws PreconditionError on irregular or disconnected graphs.
Schedule hoffman_protocol(GraphPtr g, const Spectrum& spec);

// hoffman_protocol wrapped for the round engine, named "hoffman".
Protocol hoffman_round_protocol(GraphPtr g, const Spectrum& spec);

// Same, with the caller's factor order.
Schedule hoffman_schedule(GraphPtr g, std::span<const double> lambdas, double scale);

// Gather along a BFS in-tree to root, adding at branch points, then broadcast
// along a BFS out-tree. Rounds = max dist(v, root) + max dist(root, v), which is
// 2 ecc(root) on undirected graphs.
Protocol tree_protocol(GraphPtr g, Vertex root);

// Slots of a diameter-2 protocol vertex state.
namespace diameter2_slot {
inline constexpr std::size_t own = 0;
inline constexpr std::size_t first_round = 1;   // sum of neighbour values received in round 1
inline constexpr std::size_t second_round = 2;  // sum of distance-2 shares received in round 2
inline constexpr std::size_t remembered = 3;    // round-1 values, one per in-neighbour
}  // namespace diameter2_slot

// Two rounds. Round 1: every vertex sends its value to all out-neighbours.
// Round 2: i sends to k the sum of x_j / n(j, k) over in-neighbours j of i
// with dist(j, k) = 2. A vertex then adds its own value and everything it
// received. Throws PreconditionError, naming the diameter, when it exceeds 2.
Protocol diameter2_protocol(GraphPtr g);

// Runs p1 on every copy of G1 in G1 x G2, then p2 on every copy of G2.
// Rounds add. Throws PreconditionError when a factor protocol does not
// return the global sum on its own graph.
Protocol product_protocol(const Protocol& p1, const Protocol& p2);

struct ApproxMeanProtocol {
    Protocol protocol;  // finalize reports n * y_i, an approximate sum
    Polynomial polynomial;
    double certificate = 1.0;  // offdiagonal_norm of the polynomial
    bool certified = false;    // certificate < 1 / (n - 1)
};

// y = p_m(A - dI) x with the Chebyshev polynomial of the spectrum, one
// multiplication by (A - dI) per round through the three-term recurrence.
ApproxMeanProtocol approx_mean_protocol(GraphPtr g, const Spectrum& spec, std::size_t m);

struct ApproxMeanReport {
    ProtocolResult result;
    std::vector<double> y;  // per-vertex mean estimates
    double mean = 0.0;
    double deviation = 0.0;   // ||y - mean * 1||
    double input_norm = 0.0;  // ||x||
    double certificate = 1.0;
    bool certified = false;
    bool bound_holds = false;  // deviation <= certificate * ||x||
};

ApproxMeanReport run_approx_mean(const ApproxMeanProtocol& p, std::span<const double> x,
                                 RunOptions options = {});

}  // namespace gsum
