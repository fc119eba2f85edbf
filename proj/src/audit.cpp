#include "gsum/audit.hpp"

#include <algorithm>
#include <sstream>

#include "gsum/error.hpp"
#include "gsum/protocols.hpp"
#include "gsum/spectral.hpp"

namespace gsum {

namespace {

bool exact_on_probes(const Protocol& p) {
    const std::size_t n = p.graph->n();
    for (const auto& x : {std::vector<double>(n, 1.0), uniform_input(n, 1)}) {
        try {
            if (!(run_protocol(p, x).max_rel_error <= kExactTolerance)) return false;
        } catch (const Error&) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<Candidate> exact_candidates(const CayleySpec& spec) {
    const GraphPtr g = share(build_family(spec));
    std::vector<Candidate> out;
    auto consider = [&](std::string label, auto&& make) {
        try {
            Protocol p = make();
            if (exact_on_probes(p)) out.push_back({std::move(label), std::move(p)});
        } catch (const Error&) {
            // Preconditions not met: the protocol does not apply to this graph.
        }
    };
    consider("hoffman", [&] { return hoffman_round_protocol(g, adjacency_spectrum(*g)); });
    consider("diam2", [&] { return diameter2_protocol(g); });
    if (spec.kind == Family::product) {
        consider("product", [&] {
            auto first = best_protocol(spec.factors[0]);
            auto second = best_protocol(spec.factors[1]);
            if (!first || !second) throw PreconditionError("factor without an exact protocol");
            Protocol p = product_protocol(first->protocol, second->protocol);
            // The composed graph has the same labeling as build_family's product.
            p.graph = g;
            return p;
        });
    }
    consider("tree", [&] { return tree_protocol(g, 0); });
    std::stable_sort(out.begin(), out.end(),
                     [](const Candidate& a, const Candidate& b) { return a.protocol.rounds < b.protocol.rounds; });
    return out;
}

std::optional<Candidate> best_protocol(const CayleySpec& spec) {
    auto all = exact_candidates(spec);
    if (all.empty()) return std::nullopt;
    return std::move(all.front());
}

std::optional<long long> AuditRow::gap() const {
    if (!best_rounds || !diameter) return std::nullopt;
    return static_cast<long long>(*best_rounds) - static_cast<long long>(*diameter);
}

AuditRow audit_graph(const CayleySpec& spec) {
    const Graph g = build_family(spec);
    const GraphMetrics gm = metrics(g);
    AuditRow row;
    row.graph = describe(spec);
    row.n = g.n();
    row.degree = gm.degree;
    row.diameter = gm.diameter;
    try {
        row.m = adjacency_spectrum(g).m();
    } catch (const Error&) {
        row.m = std::nullopt;
    }
    if (auto best = best_protocol(spec)) {
        row.best_protocol = best->label;
        row.best_rounds = best->protocol.rounds;
    }
    return row;
}

std::vector<CayleySpec> family_instances(std::span<const std::string> families, std::size_t lo, std::size_t hi) {
    std::vector<CayleySpec> out;
    for (const std::string& family : families) {
        if (family == "petersen") {
            out.push_back(CayleySpec::petersen());
            continue;
        }
        std::size_t min_size = 0;
        if (family == "cycle") {
            min_size = 3;
        } else if (family == "complete") {
            min_size = 2;
        } else if (family == "hypercube") {
            min_size = 1;
        } else {
            throw InvalidArgument("audit does not know family '" + family + "'");
        }
        for (std::size_t s = std::max(lo, min_size); s <= hi; ++s) {
            if (family == "cycle") out.push_back(CayleySpec::cycle(s));
            if (family == "complete") out.push_back(CayleySpec::complete(s));
            if (family == "hypercube") out.push_back(CayleySpec::hypercube(s));
        }
    }
    return out;
}

std::vector<CayleySpec> product_instances(std::span<const CayleySpec> factors, std::size_t max_n) {
    std::vector<std::size_t> sizes;
    for (const auto& f : factors) sizes.push_back(build_family(f).n());
    std::vector<CayleySpec> out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        for (std::size_t j = i; j < factors.size(); ++j) {
            if (sizes[i] * sizes[j] <= max_n) out.push_back(CayleySpec::product(factors[i], factors[j]));
        }
    }
    return out;
}

std::string audit_csv(std::span<const AuditRow> rows) {
    std::ostringstream out;
    out << "# exact_rel_tol=" << kExactTolerance << " spectral_tol=1e-8*max(1,d)\n";
    out << "graph,n,d,D,m,best_protocol,best_rounds,gap\n";
    auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
    for (const AuditRow& r : rows) {
        out << '"' << r.graph << '"' << ',' << r.n << ',' << opt(r.degree) << ',' << opt(r.diameter) << ','
            << opt(r.m) << ',' << r.best_protocol << ',' << opt(r.best_rounds) << ',' << opt(r.gap()) << '\n';
    }
    return out.str();
}

}  // namespace gsum
