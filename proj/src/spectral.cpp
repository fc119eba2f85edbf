#include "gsum/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "gsum/error.hpp"

namespace gsum {

double default_tolerance(double degree) { return 1e-8 * std::max(1.0, degree); }

Spectrum cluster_eigenvalues(std::vector<double> values, double degree, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("clustering tolerance must be positive");
    std::sort(values.begin(), values.end(), std::greater<>());
    Spectrum spec;
    spec.n = values.size();
    spec.degree = degree;
    spec.tol = tol;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= values.size(); ++i) {
        const bool split = i == values.size() || (i > begin && values[i - 1] - values[i] > tol);
        if (i < values.size() && i > 0) {
            const double gap = values[i - 1] - values[i];
            if (gap > tol && gap <= 10.0 * tol) spec.near_degenerate = true;
        }
        if (!split) continue;
        if (i > begin) {
            double sum = 0.0;
            for (std::size_t k = begin; k < i; ++k) sum += values[k];
            spec.entries.push_back({sum / static_cast<double>(i - begin), i - begin});
        }
        begin = i;
    }
    // The top eigenvalue of a d-regular graph is d itself.
    if (!spec.entries.empty() && std::abs(spec.entries.front().value - degree) <= tol) {
        spec.entries.front().value = degree;
    }
    return spec;
}

Spectrum adjacency_spectrum(const Graph& g, std::optional<double> tol) {
    const auto degree = g.regular_degree();
    if (!degree) throw PreconditionError("adjacency spectrum requires a regular graph");
    const double d = static_cast<double>(*degree);
    if (!g.symmetric()) {
        if (auto s = g.circulant_connections()) return circulant_spectrum(g.n(), *s, tol);
        throw UnsupportedError("unsupported: symmetric spectra only");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.adjacency(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return cluster_eigenvalues(std::vector<double>(ev.data(), ev.data() + ev.size()), d,
                               tol.value_or(default_tolerance(d)));
}

std::vector<std::complex<double>> circulant_eigenvalues(std::size_t n,
                                                        std::span<const std::size_t> connections) {
    std::vector<std::complex<double>> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> sum = 0.0;
        for (std::size_t s : connections) {
            // Reduce j*s mod n first so the angle stays in [0, 2 pi).
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * s) % n) /
                                 static_cast<double>(n);
            sum += std::polar(1.0, angle);
        }
        out[j] = sum;
    }
    return out;
}

Spectrum circulant_spectrum(std::size_t n, std::span<const std::size_t> connections,
                            std::optional<double> tol) {
    if (n < 1) throw InvalidArgument("circulant needs n >= 1");
    for (std::size_t s : connections) {
        if (s == 0 || s >= n) throw InvalidArgument("connection " + std::to_string(s) + " outside 1..n-1");
    }
    std::vector<std::size_t> sorted(connections.begin(), connections.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t s : sorted) {
        if (!std::binary_search(sorted.begin(), sorted.end(), n - s)) {
            throw UnsupportedError("asymmetric connection set: eigenvalues are complex (offset " +
                                   std::to_string(s) + " has no inverse)");
        }
    }
    const double d = static_cast<double>(sorted.size());
    std::vector<double> values;
    values.reserve(n);
    for (const auto& z : circulant_eigenvalues(n, sorted)) values.push_back(z.real());
    return cluster_eigenvalues(std::move(values), d, tol.value_or(default_tolerance(d)));
}

HoffmanFactors hoffman_factors(const Spectrum& spec) {
    if (!spec.connected()) {
        throw PreconditionError("Hoffman factors need a simple top eigenvalue (connected regular graph)");
    }
    HoffmanFactors out;
    double product = 1.0;
    for (std::size_t t = 1; t < spec.entries.size(); ++t) {
        const double lambda = spec.entries[t].value;
        const double gap = spec.degree - lambda;
        if (std::abs(gap) <= spec.tol) {
            throw PreconditionError("eigenvalue " + std::to_string(lambda) + " coincides with the degree");
        }
        out.lambdas.push_back(lambda);
        product *= gap;
    }
    out.scale = static_cast<double>(spec.n) / product;
    return out;
}

std::vector<double> leja_order(std::span<const double> roots, double degree) {
    std::vector<double> left(roots.begin(), roots.end());
    std::vector<double> out;
    out.reserve(left.size());
    // Log-distances avoid overflow of the running products.
    std::vector<double> score(left.size());
    for (std::size_t i = 0; i < left.size(); ++i) score[i] = std::log(std::abs(degree - left[i]));
    while (!left.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < left.size(); ++i) {
            if (score[i] > score[best]) best = i;
        }
        const double chosen = left[best];
        out.push_back(chosen);
        left.erase(left.begin() + static_cast<std::ptrdiff_t>(best));
        score.erase(score.begin() + static_cast<std::ptrdiff_t>(best));
        for (std::size_t i = 0; i < left.size(); ++i) {
            score[i] += std::log(std::abs(left[i] - chosen));
        }
    }
    return out;
}

Polynomial Polynomial::monomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw InvalidArgument("polynomial needs at least one coefficient");
    Polynomial p;
    p.coeffs_ = std::move(coeffs);
    return p;
}

Polynomial Polynomial::one() { return Polynomial{}; }

Polynomial Polynomial::chebyshev(double a, double b, std::size_t m) {
    if (!(a < b) || !(b < 0.0)) throw InvalidArgument("Chebyshev interval must satisfy a < b < 0");
    Polynomial p;
    p.form_ = Form::chebyshev;
    p.a_ = a;
    p.b_ = b;
    if (m == 0) return p;
    // t(x) = alpha x + beta maps [a, b] onto [-1, 1].
    const double alpha = 2.0 / (b - a);
    const double beta = -(a + b) / (b - a);
    std::vector<double> prev{1.0};
    std::vector<double> cur{beta, alpha};
    for (std::size_t k = 1; k < m; ++k) {
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            next[i] += 2.0 * beta * cur[i];
            next[i + 1] += 2.0 * alpha * cur[i];
        }
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    // cur[0] = T_m(beta) is the normaliser.
    const double norm = cur[0];
    for (double& c : cur) c /= norm;
    cur[0] = 1.0;
    p.coeffs_ = std::move(cur);
    return p;
}

Polynomial Polynomial::linear_power(double root, std::size_t m) {
    if (root == 0.0) throw InvalidArgument("linear factor root must be non-zero");
    Polynomial p;
    p.form_ = Form::linear_power;
    p.a_ = root;
    p.b_ = root;
    std::vector<double> coeffs{1.0};
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<double> next(coeffs.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            next[i] += coeffs[i];
            next[i + 1] -= coeffs[i] / root;
        }
        coeffs = std::move(next);
    }
    p.coeffs_ = std::move(coeffs);
    return p;
}

double Polynomial::operator()(double x) const {
    switch (form_) {
        case Form::chebyshev: {
            const std::size_t m = degree();
            if (m == 0) return 1.0;
            const double t = (2.0 * x - a_ - b_) / (b_ - a_);
            const double t0 = (-a_ - b_) / (b_ - a_);
            double p0 = 1.0, p1 = t, q0 = 1.0, q1 = t0;
            for (std::size_t k = 1; k < m; ++k) {
                const double p2 = 2.0 * t * p1 - p0;
                const double q2 = 2.0 * t0 * q1 - q0;
                p0 = p1;
                p1 = p2;
                q0 = q1;
                q1 = q2;
            }
            return p1 / q1;
        }
        case Form::linear_power:
            return std::pow(1.0 - x / a_, static_cast<double>(degree()));
        case Form::monomial:
            break;
    }
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial chebyshev_polynomial(const Spectrum& spec, std::size_t m) {
    if (m == 0) return Polynomial::one();
    if (spec.distinct() < 2) throw PreconditionError("spectrum has a single distinct eigenvalue");
    if (!spec.connected()) {
        throw PreconditionError("eigenvalue " + std::to_string(spec.entries.front().value) + " has multiplicity " +
                                std::to_string(spec.entries.front().multiplicity) +
                                ": shifted interval contains 0 (disconnected graph)");
    }
    const double d = spec.degree;
    const double a = spec.entries.back().value - d;
    const double b = spec.entries[1].value - d;
    if (b >= 0.0) {
        throw PreconditionError("eigenvalue " + std::to_string(spec.entries[1].value) +
                                " reaches the degree: shifted interval contains 0");
    }
    if (spec.distinct() == 2) return Polynomial::linear_power(a, m);
    return Polynomial::chebyshev(a, b, m);
}

double offdiagonal_norm(const Polynomial& p, const Spectrum& spec) {
    double norm = 0.0;
    if (!spec.entries.empty() && spec.entries.front().multiplicity > 1) norm = std::abs(p(0.0));
    for (std::size_t t = 1; t < spec.entries.size(); ++t) {
        norm = std::max(norm, std::abs(p(spec.entries[t].value - spec.degree)));
    }
    return norm;
}

bool certifies(double eps, std::size_t n) {
    if (n <= 1) return true;
    return eps < (1.0 - 1e-9) / static_cast<double>(n - 1);
}

DiameterBound diameter_bound(const Spectrum& spec) {
    if (spec.n <= 1) return {0, 0.0};
    if (!spec.connected()) throw PreconditionError("diameter bound needs a connected spectrum");
    // The Chebyshev norm decays geometrically; the cap only guards against a
    // malformed spectrum.
    const std::size_t cap = 10 * spec.n + 100;
    for (std::size_t m = 1; m <= cap; ++m) {
        const double eps = offdiagonal_norm(chebyshev_polynomial(spec, m), spec);
        if (certifies(eps, spec.n)) return {m, eps};
    }
    throw Error("diameter bound did not converge");
}

}  // namespace gsum
