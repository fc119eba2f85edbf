#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "gsum/error.hpp"
#include "gsum/spectral.hpp"
#include "oracles.hpp"

using namespace gsum;

namespace {

void check_matches(const Spectrum& s, const std::vector<double>& values) {
    CHECK(s.distinct() == oracle::distinct(values, 1e-6));
    std::size_t total = 0;
    for (const auto& e : s.entries) {
        total += e.multiplicity;
        const auto count = std::count_if(values.begin(), values.end(),
                                         [&](double v) { return std::abs(v - e.value) < 1e-6; });
        CHECK(static_cast<std::size_t>(count) == e.multiplicity);
    }
    CHECK(total == values.size());
}

// p(A - dI) by Horner on matrices from the monomial coefficients.
Eigen::MatrixXd matrix_poly(const Polynomial& p, const Eigen::MatrixXd& x) {
    const auto& c = p.coefficients();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        acc = acc * x + *it * Eigen::MatrixXd::Identity(x.rows(), x.cols());
    return acc;
}

}  // namespace

TEST_CASE("family spectra against closed forms") {
    for (std::size_t d = 1; d <= 6; ++d) {
        const Spectrum s = adjacency_spectrum(build_family(CayleySpec::hypercube(d)));
        check_matches(s, oracle::hypercube_eigenvalues(d));
        CHECK(s.m() == d);
    }
    for (std::size_t n = 3; n <= 40; ++n) {
        const Spectrum s = adjacency_spectrum(build_family(CayleySpec::cycle(n)));
        check_matches(s, oracle::cycle_eigenvalues(n));
        CHECK(s.m() == n / 2);
    }
    for (std::size_t n = 2; n <= 12; ++n) {
        const Spectrum s = adjacency_spectrum(build_family(CayleySpec::complete(n)));
        check_matches(s, oracle::complete_eigenvalues(n));
        CHECK(s.m() == 1);
    }
}

TEST_CASE("petersen spectrum") {
    const Spectrum s = adjacency_spectrum(build_family(CayleySpec::petersen()));
    REQUIRE(s.distinct() == 3);
    CHECK(s.entries[0].value == 3.0);
    CHECK(s.entries[0].multiplicity == 1);
    CHECK(s.entries[1].value == doctest::Approx(1.0));
    CHECK(s.entries[1].multiplicity == 5);
    CHECK(s.entries[2].value == doctest::Approx(-2.0));
    CHECK(s.entries[2].multiplicity == 4);
    CHECK(s.tol == doctest::Approx(3e-8));
    CHECK(s.connected());
}

TEST_CASE("circulant formula agrees with the dense eigensolver") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 4 + rng() % 29;
        std::vector<std::size_t> s;
        for (std::size_t k = 1; k <= n / 2; ++k)
            if (rng() % 3 == 0) s.push_back(k);
        if (s.empty()) s.push_back(1);
        const Graph g = build_family(CayleySpec::circulant(n, s));
        const auto conn = *g.circulant_connections();
        const Spectrum a = adjacency_spectrum(g);
        const Spectrum b = circulant_spectrum(n, conn);
        CAPTURE(describe(CayleySpec::circulant(n, s)));
        REQUIRE(a.distinct() == b.distinct());
        for (std::size_t i = 0; i < a.distinct(); ++i) {
            CHECK(a.entries[i].value == doctest::Approx(b.entries[i].value).epsilon(1e-9));
            CHECK(a.entries[i].multiplicity == b.entries[i].multiplicity);
        }
    }
}

TEST_CASE("directed circulants") {
    const auto z = circulant_eigenvalues(5, std::vector<std::size_t>{1});
    CHECK(std::abs(z[0] - 1.0) < 1e-12);
    CHECK(std::abs(z[1] - std::polar(1.0, 2.0 * std::numbers::pi / 5)) < 1e-12);
    CHECK_THROWS_AS(circulant_spectrum(5, std::vector<std::size_t>{1, 2}), UnsupportedError);
    // A directed circulant whose connection set happens to be closed under negation.
    const Graph g = build_family(CayleySpec::circulant(6, {1, 5}, true));
    CHECK(adjacency_spectrum(g).m() == 3);
    CHECK_THROWS_AS(adjacency_spectrum(build_family(CayleySpec::circulant(5, {1, 2}, true))), UnsupportedError);
}

TEST_CASE("spectrum preconditions") {
    const Graph irregular(3, {{0, 1}, {1, 2}}, false);
    CHECK_THROWS_AS(adjacency_spectrum(irregular), PreconditionError);
    // Regular, directed, not circulant as labelled.
    const Graph g(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}, {0, 2}, {2, 1}, {1, 3}, {3, 0}}, true);
    REQUIRE(g.regular_degree().has_value());
    REQUIRE_FALSE(g.symmetric());
    CHECK_THROWS_AS(adjacency_spectrum(g), UnsupportedError);
}

TEST_CASE("clustering is stable under perturbations below the tolerance") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> noise(-1e-11, 1e-11);
    for (std::size_t d = 2; d <= 6; ++d) {
        auto values = oracle::hypercube_eigenvalues(d);
        const Spectrum clean = cluster_eigenvalues(values, static_cast<double>(d), default_tolerance(d));
        for (int trial = 0; trial < 20; ++trial) {
            auto noisy = values;
            for (double& v : noisy) v += noise(rng);
            const Spectrum s = cluster_eigenvalues(noisy, static_cast<double>(d), default_tolerance(d));
            REQUIRE(s.distinct() == clean.distinct());
            for (std::size_t i = 0; i < s.distinct(); ++i) {
                CHECK(s.entries[i].multiplicity == clean.entries[i].multiplicity);
                CHECK(std::abs(s.entries[i].value - clean.entries[i].value) < 1e-10);
            }
        }
    }
}

TEST_CASE("near-degenerate gaps are flagged") {
    const Spectrum s = cluster_eigenvalues({3.0, 1.0, 1.0 + 5e-8, -2.0}, 3.0, 3e-8);
    CHECK(s.distinct() == 4);
    CHECK(s.near_degenerate);
    const Spectrum t = cluster_eigenvalues({3.0, 1.0, 1.0 + 2e-8, -2.0}, 3.0, 3e-8);
    CHECK(t.distinct() == 3);
    CHECK_FALSE(t.near_degenerate);
    CHECK_THROWS_AS(cluster_eigenvalues({1.0}, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("disconnected regular graphs have a repeated top eigenvalue") {
    const Graph g(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}, false);
    const Spectrum s = adjacency_spectrum(g);
    CHECK_FALSE(s.connected());
    CHECK(s.entries[0].multiplicity == 2);
    CHECK_THROWS_AS(hoffman_factors(s), PreconditionError);
    CHECK_THROWS_AS(chebyshev_polynomial(s, 2), PreconditionError);
    CHECK_THROWS_AS(diameter_bound(s), PreconditionError);
}

TEST_CASE("Hoffman factors multiply to J") {
    std::vector<CayleySpec> specs{CayleySpec::petersen(), CayleySpec::cycle(9), CayleySpec::hypercube(4),
                                  CayleySpec::complete(5), CayleySpec::circulant(11, {1, 3})};
    for (const auto& spec : specs) {
        CAPTURE(describe(spec));
        const Graph g = build_family(spec);
        const Spectrum s = adjacency_spectrum(g);
        const HoffmanFactors f = hoffman_factors(s);
        CHECK(f.lambdas.size() == s.m());
        const Eigen::MatrixXd a = oracle::adjacency(g);
        const auto n = static_cast<Eigen::Index>(g.n());
        Eigen::MatrixXd p = f.scale * Eigen::MatrixXd::Identity(n, n);
        for (double l : f.lambdas) p = (a - l * Eigen::MatrixXd::Identity(n, n)) * p;
        CHECK((p - oracle::ones(g.n())).norm() < 1e-8 * static_cast<double>(g.n()));
    }
    const HoffmanFactors pf = hoffman_factors(adjacency_spectrum(build_family(CayleySpec::petersen())));
    CHECK(pf.scale == doctest::Approx(1.0));  // 10 / ((3 - 1)(3 + 2))
}

TEST_CASE("Leja order is a permutation starting farthest from the degree") {
    const std::vector<double> roots{1.9, 1.2, 0.3, -0.5, -1.1, -1.8, -2.0};
    const auto order = leja_order(roots, 2.0);
    auto a = order, b = roots;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(order.front() == -2.0);
    CHECK(order[1] == 0.3);  // maximises |2 - r| |r + 2|
    CHECK(leja_order(std::vector<double>{}, 3.0).empty());
}

TEST_CASE("Chebyshev polynomial values") {
    // Petersen: interval [-5, -2], m = 2 gives 9/89 at both ends.
    const Spectrum s = adjacency_spectrum(build_family(CayleySpec::petersen()));
    const Polynomial p = chebyshev_polynomial(s, 2);
    CHECK(p.form() == Polynomial::Form::chebyshev);
    CHECK(p.lower() == doctest::Approx(-5.0));
    CHECK(p.upper() == doctest::Approx(-2.0));
    CHECK(p(0.0) == doctest::Approx(1.0));
    CHECK(p(-2.0) == doctest::Approx(9.0 / 89.0));
    CHECK(p(-5.0) == doctest::Approx(9.0 / 89.0));
    CHECK(offdiagonal_norm(p, s) == doctest::Approx(9.0 / 89.0).epsilon(1e-12));
    // T_2(t) = 2t^2 - 1 with t = (2x + 7) / 3, divided by T_2(7/3) = 89/9.
    const auto& c = p.coefficients();
    REQUIRE(c.size() == 3);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == doctest::Approx(56.0 / 89.0));
    CHECK(c[2] == doctest::Approx(8.0 / 89.0));
    CHECK(chebyshev_polynomial(s, 0).degree() == 0);
}

TEST_CASE("recurrence and monomial expansion agree") {
    for (std::size_t m = 1; m <= 8; ++m) {
        const Polynomial p = Polynomial::chebyshev(-6.0, -0.5, m);
        const Polynomial q = Polynomial::monomial(p.coefficients());
        CHECK(p.degree() == m);
        CHECK(p.coefficients()[0] == 1.0);
        for (double x = -6.0; x <= 0.0; x += 0.25) CHECK(p(x) == doctest::Approx(q(x)).epsilon(1e-9));
        // Equioscillation: |p| <= 1 / T_m(t(0)) on the interval.
        for (double x = -6.0; x <= -0.5; x += 0.01) CHECK(std::abs(p(x)) <= std::abs(p(-0.5)) * (1 + 1e-12));
    }
    CHECK_THROWS_AS(Polynomial::chebyshev(-1.0, -2.0, 2), InvalidArgument);
    CHECK_THROWS_AS(Polynomial::chebyshev(-1.0, 0.5, 2), InvalidArgument);
}

TEST_CASE("two distinct eigenvalues give a linear power") {
    const Spectrum s = adjacency_spectrum(build_family(CayleySpec::complete(6)));
    const Polynomial p = chebyshev_polynomial(s, 1);
    CHECK(p.form() == Polynomial::Form::linear_power);
    CHECK(p.root() == doctest::Approx(-6.0));
    CHECK(p(-6.0) == doctest::Approx(0.0));
    CHECK(offdiagonal_norm(p, s) < 1e-12);
    CHECK(diameter_bound(s).m == 1);
}

TEST_CASE("offdiagonal norm is the spectral norm of p(A - dI) - J/n") {
    std::vector<CayleySpec> specs{CayleySpec::petersen(), CayleySpec::cycle(10), CayleySpec::hypercube(4),
                                  CayleySpec::circulant(13, {1, 5})};
    for (const auto& spec : specs) {
        const Graph g = build_family(spec);
        const Spectrum s = adjacency_spectrum(g);
        const auto n = static_cast<Eigen::Index>(g.n());
        const Eigen::MatrixXd x = oracle::adjacency(g) - s.degree * Eigen::MatrixXd::Identity(n, n);
        for (std::size_t m = 1; m <= 4; ++m) {
            const Polynomial p = chebyshev_polynomial(s, m);
            const Eigen::MatrixXd e = matrix_poly(p, x) - oracle::ones(g.n()) / static_cast<double>(n);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e);
            const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
            CAPTURE(describe(spec));
            CAPTURE(m);
            CHECK(offdiagonal_norm(p, s) == doctest::Approx(norm).epsilon(1e-8));
        }
    }
}

TEST_CASE("diameter bound dominates the diameter") {
    std::vector<CayleySpec> specs;
    for (std::size_t n = 3; n <= 24; ++n) specs.push_back(CayleySpec::cycle(n));
    for (std::size_t n = 2; n <= 10; ++n) specs.push_back(CayleySpec::complete(n));
    for (std::size_t d = 1; d <= 6; ++d) specs.push_back(CayleySpec::hypercube(d));
    specs.push_back(CayleySpec::petersen());
    for (const auto& spec : specs) {
        const Graph g = build_family(spec);
        const DiameterBound b = diameter_bound(adjacency_spectrum(g));
        CAPTURE(describe(spec));
        CHECK(oracle::diameter(g) <= b.m);
        CHECK(b.certificate < 1.0 / static_cast<double>(g.n() - 1));
    }
    const DiameterBound pb = diameter_bound(adjacency_spectrum(build_family(CayleySpec::petersen())));
    CHECK(pb.m == 2);
    CHECK(pb.certificate == doctest::Approx(9.0 / 89.0).epsilon(1e-12));
    CHECK(diameter_bound(cluster_eigenvalues({0.0}, 0.0, 1e-8)).m == 0);
}
