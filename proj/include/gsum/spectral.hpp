#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gsum/graph.hpp"

namespace gsum {

struct Eigenvalue {
    double value = 0.0;
    std::size_t multiplicity = 0;
};

// Distinct adjacency eigenvalues of a regular graph, clustered at a fixed
// tolerance. Every Spectrum carries the tolerance that produced it.
struct Spectrum {
    std::vector<Eigenvalue> entries;  // descending
    std::size_t n = 0;
    double degree = 0.0;
    double tol = 0.0;
    // Some gap between neighbouring raw eigenvalues fell in (tol, 10 tol]:
    // the distinct count may depend on the tolerance.
    bool near_degenerate = false;

    std::size_t distinct() const { return entries.size(); }
    // Number of non-principal distinct eigenvalues.
    std::size_t m() const { return entries.empty() ? 0 : entries.size() - 1; }
    // Top eigenvalue simple, i.e. the regular graph is connected.
    bool connected() const { return !entries.empty() && entries.front().multiplicity == 1; }
};

// 1e-8 * max(1, d).
double default_tolerance(double degree);

// Sorts descending and merges neighbours whose gap is <= tol; a cluster's
// value is the mean of its members.
Spectrum cluster_eigenvalues(std::vector<double> values, double degree, double tol);

// Dense symmetric eigensolve of the adjacency matrix. Requires a regular
// graph. Non-symmetric circulants go through circulant_spectrum; any other
// non-symmetric graph throws UnsupportedError.
Spectrum adjacency_spectrum(const Graph& g, std::optional<double> tol = std::nullopt);

// lambda_j = sum_{s in S} exp(2 pi i j s / n), j = 0..n-1.
std::vector<std::complex<double>> circulant_eigenvalues(std::size_t n,
                                                        std::span<const std::size_t> connections);

// Real spectrum of a circulant. An asymmetric connection set has complex
// eigenvalues; that case throws UnsupportedError and callers use
// circulant_eigenvalues instead.
Spectrum circulant_spectrum(std::size_t n, std::span<const std::size_t> connections,
                            std::optional<double> tol = std::nullopt);

struct HoffmanFactors {
    std::vector<double> lambdas;  // non-principal distinct eigenvalues, descending
    double scale = 1.0;           // n / prod(d - lambda)
};

HoffmanFactors hoffman_factors(const Spectrum& spec);

// Reorders factor roots so that partial products stay bounded: each next root
// maximises the product of distances to the roots already chosen, starting
// from the one farthest from the degree. Long descending products overflow
// the unit-roundoff budget on cycles of a few dozen vertices.
std::vector<double> leja_order(std::span<const double> roots, double degree);

// Real polynomial with p(0) = 1 in the uses below. Chebyshev and
// linear-power forms keep their defining parameters and evaluate through
// them; coefficients() is always the monomial expansion.
class Polynomial {
public:
    enum class Form { monomial, chebyshev, linear_power };

    static Polynomial monomial(std::vector<double> coeffs);
    static Polynomial one();
    // T_m((2x - a - b) / (b - a)) / T_m((-a - b) / (b - a)); requires a < b < 0.
    static Polynomial chebyshev(double a, double b, std::size_t m);
    // (1 - x / root)^m; requires root != 0.
    static Polynomial linear_power(double root, std::size_t m);

    Form form() const { return form_; }
    std::size_t degree() const { return coeffs_.size() - 1; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    double lower() const { return a_; }
    double upper() const { return b_; }
    double root() const { return a_; }

    double operator()(double x) const;

private:
    Form form_ = Form::monomial;
    std::vector<double> coeffs_{1.0};
    double a_ = 0.0;
    double b_ = 0.0;
};

// Scaled and shifted Chebyshev polynomial on [lambda_min - d, lambda_2 - d].
// When only one non-principal eigenvalue exists the interval is a point and
// (1 - x / (lambda - d))^m is returned, which vanishes there.
Polynomial chebyshev_polynomial(const Spectrum& spec, std::size_t m);

// max |p(lambda - d)| over non-principal eigenvalues; a repeated top
// eigenvalue contributes |p(0)|.
double offdiagonal_norm(const Polynomial& p, const Spectrum& spec);

// eps < 1 / (n - 1) with a relative margin of 1e-9, so that a norm equal
// to the threshold in exact arithmetic is not accepted after rounding.
bool certifies(double eps, std::size_t n);

struct DiameterBound {
    std::size_t m = 0;
    double certificate = 0.0;  // offdiagonal_norm at that m
};

// Least m whose Chebyshev polynomial certifies: offdiagonal_norm < 1 / (n - 1).
DiameterBound diameter_bound(const Spectrum& spec);

}  // namespace gsum
