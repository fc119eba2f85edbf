#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsum/engine.hpp"
#include "gsum/spectral.hpp"

namespace gsum {

// Products are taken in execution order: steps {W1, ..., Wm} act as
// Wm * ... * W1, the operator a linear schedule applies to its input.
Eigen::MatrixXd execution_product(std::span<const StepMatrix> steps, std::size_t n);

inline constexpr double kDefaultPassTolerance = 1e-8;

struct Factorization {
    GraphPtr graph;
    std::vector<StepMatrix> steps;
    double residual = 0.0;  // ||product - J||_F

    std::size_t length() const { return steps.size(); }
};

struct VerifyReport {
    double residual = 0.0;
    double threshold = 0.0;  // tol * n
    bool pass = false;
};

// Pass iff ||product - J||_F <= tol * n.
VerifyReport verify_factorization(const Graph& g, std::span<const StepMatrix> steps,
                                  double tol = kDefaultPassTolerance);
// Dense candidates are checked against the support mask first; a violation
// throws InvalidArgument before anything is multiplied.
VerifyReport verify_factorization(GraphPtr g, std::span<const Eigen::MatrixXd> steps,
                                  double tol = kDefaultPassTolerance);

// The eigenvalue factors (A - lambda I) in Leja order, the first one carrying
// the scale n / prod(d - lambda), so the product is J.
Factorization eigen_factorization(GraphPtr g, const Spectrum& spec);

// Circulant step with first column w: W(u, v) = w[(u - v) mod n], so w[s] is
// the weight on the edges v -> v + s and w[0] the diagonal. Its eigenvalue on
// f_j[v] = exp(2 pi i j v / n) / sqrt(n) is fourier[j] = sum_s w[s] exp(-2 pi i j s / n).
struct CirculantVector {
    std::size_t n = 0;
    std::vector<std::size_t> support;  // sorted, contains 0
    std::vector<double> weights;       // length n, zero off the support
    std::vector<std::complex<double>> fourier;
};

CirculantVector make_circulant_vector(std::size_t n, std::vector<std::size_t> support, std::vector<double> weights);

// connections: the graph's connection set S (0 excluded). Throws
// InvalidArgument naming the offending pair of rows when a step is not
// circulant, or a weight lies outside S and 0.
std::vector<CirculantVector> circulant_reduce(std::size_t n, std::span<const std::size_t> connections,
                                              std::span<const Eigen::MatrixXd> steps);
std::vector<CirculantVector> circulant_reduce(std::size_t n, std::span<const std::size_t> connections,
                                              std::span<const StepMatrix> steps);

struct FourierRow {
    std::size_t j = 0;
    std::size_t best_step = 0;  // 0-based index of the step minimising |(w_k, f_j)|
    double magnitude = 0.0;     // |(w_k, f_j)| = |fourier_k[j]| / sqrt(n)
    bool covered = false;
};

struct FourierCoverReport {
    std::size_t n = 0;
    double tol = 0.0;
    std::vector<FourierRow> rows;  // j = 1..n-1
    std::complex<double> dc_product;
    bool dc_ok = false;  // |dc_product - n| <= tol * n
    bool pass = false;   // every row covered and dc_ok
};

// Throws InvalidArgument on an empty list (the DC product is undefined) or
// vectors of different n.
FourierCoverReport fourier_cover_check(std::span<const CirculantVector> vectors,
                                       double tol = kDefaultPassTolerance);

// Shortest factorization length allowed by walk counting: (product)(u, v) can
// be nonzero only if a walk of at most that many steps leads from v to u.
// Equals the diameter; nullopt for graphs that are not strongly connected.
std::optional<std::size_t> reachability_lower_bound(const Graph& g);

enum class SearchStatus { found, not_found, rejected_by_walk_bound };

struct SearchOptions {
    std::size_t budget = 1000;  // total sweeps over all restarts
    std::uint64_t seed = 0;
    std::size_t restarts = 4;
    double tol = kDefaultPassTolerance;
    double ridge = 1e-12;
    std::vector<StepMatrix> warm_start;  // used by the first restart when non-empty
};

struct SearchResult {
    SearchStatus status = SearchStatus::not_found;
    Factorization best;  // empty steps when rejected
    std::size_t best_restart = 0;
    std::vector<std::vector<double>> histories;  // residual per sweep, per restart; [0] is the start
    std::optional<std::size_t> lower_bound;
    std::size_t unknowns = 0;   // m (n + |E|)
    std::size_t equations = 0;  // n^2
    // Numerical rank of the Jacobian of the product at the best point; only
    // computed for small systems.
    std::optional<std::size_t> jacobian_rank;
};

// Alternating least squares over the masked steps with seeded random
// restarts. Best effort: not_found never means that no factorization exists.
// Throws InvalidArgument for m == 0 or budget == 0.
SearchResult search_factorization(GraphPtr g, std::size_t m, const SearchOptions& options);

struct SymmetrizeResult {
    Factorization projected;
    double residual_before = 0.0;
    double residual_after = 0.0;
};

// Replaces every step by its circulant average: weight on v -> v + s becomes
// the mean over v. Throws PreconditionError if g is not circulant as labelled.
SymmetrizeResult cayley_symmetrize(GraphPtr g, const Factorization& f);

// Text exchange format:
//   factorization n=<n> m=<m> residual=<r>
//   step <t> nnz=<k>
//   i j w            (k lines, W(i, j) = w, diagonal included)
std::string to_text(const Factorization& f);
// Schedules use the same blocks under "schedule n=<n> m=<m> scale=<s>".
std::string to_text(const Schedule& s);

struct ParsedSteps {
    std::size_t n = 0;
    std::optional<double> residual;  // factorization header
    std::optional<double> scale;     // schedule header
    std::vector<Eigen::MatrixXd> steps;
};

// Throws ParseError with the line number.
ParsedSteps parse_steps(const std::string& text);

}  // namespace gsum
