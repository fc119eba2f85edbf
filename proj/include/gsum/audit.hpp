#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsum/engine.hpp"
#include "gsum/graph.hpp"

namespace gsum {

inline constexpr double kExactTolerance = 1e-9;

struct Candidate {
    std::string label;  // hoffman | diam2 | tree | product
    Protocol protocol;
};

// Implemented protocols that return the global sum on spec's graph (checked
// on deterministic probes at kExactTolerance), fewest rounds first. Product
// specs also get the composition of their factors' best protocols.
std::vector<Candidate> exact_candidates(const CayleySpec& spec);

std::optional<Candidate> best_protocol(const CayleySpec& spec);

struct AuditRow {
    std::string graph;
    std::size_t n = 0;
    std::optional<std::size_t> degree;
    std::optional<std::size_t> diameter;
    std::optional<std::size_t> m;  // distinct eigenvalues - 1
    std::string best_protocol;
    std::optional<std::size_t> best_rounds;

    // rounds - D, the gap to sum optimality
    std::optional<long long> gap() const;
};

AuditRow audit_graph(const CayleySpec& spec);

// Instances of the named families with size parameter in [lo, hi]
// (n for cycle/complete, dimension for hypercube; petersen ignores the range).
// Invalid sizes (cycle(1), ...) are skipped.
std::vector<CayleySpec> family_instances(std::span<const std::string> families, std::size_t lo, std::size_t hi);

// Unordered pairs (with repetition) of instances whose product has at most max_n vertices.
std::vector<CayleySpec> product_instances(std::span<const CayleySpec> factors, std::size_t max_n);

// Header "graph,n,d,D,m,best_protocol,best_rounds,gap" after a comment line
// with the tolerance used; empty fields where a value does not exist.
std::string audit_csv(std::span<const AuditRow> rows);

}  // namespace gsum
