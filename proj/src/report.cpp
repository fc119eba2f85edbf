#include "gsum/report.hpp"

namespace gsum {

using nlohmann::json;

json to_json(const Spectrum& spec) {
    json entries = json::array();
    for (const auto& e : spec.entries) entries.push_back({e.value, e.multiplicity});
    return {{"entries", std::move(entries)},
            {"m", spec.m()},
            {"tol", spec.tol},
            {"n", spec.n},
            {"degree", spec.degree},
            {"near_degenerate", spec.near_degenerate}};
}

json to_json(const Polynomial& p) { return {{"coeffs", p.coefficients()}}; }

json to_json(const ProtocolResult& r) {
    json out = {{"rounds", r.rounds},
                {"values", r.values},
                {"sum", r.sum},
                {"mean", r.mean},
                {"max_abs_error", r.max_abs_error},
                {"max_rel_error", r.max_rel_error}};
    if (!r.trace.empty()) out["trace"] = r.trace;
    return out;
}

json describe(const Protocol& p) { return {{"name", p.name}, {"rounds", p.rounds}, {"theorem", p.theorem}}; }

json to_json(const VerifyReport& r) {
    return {{"residual", r.residual}, {"threshold", r.threshold}, {"pass", r.pass}};
}

json to_json(const FourierCoverReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"j", row.j}, {"step", row.best_step + 1}, {"magnitude", row.magnitude}, {"covered", row.covered}});
    }
    return {{"n", r.n},
            {"tol", r.tol},
            {"rows", std::move(rows)},
            {"dc_product", {r.dc_product.real(), r.dc_product.imag()}},
            {"dc_ok", r.dc_ok},
            {"pass", r.pass}};
}

json to_json(const SearchResult& r) {
    const char* status = r.status == SearchStatus::found            ? "found"
                         : r.status == SearchStatus::not_found      ? "no solution found within budget"
                                                                    : "rejected by walk lower bound";
    json out = {{"experimental", true},
                {"status", status},
                {"target_length", r.best.steps.size()},
                {"unknowns", r.unknowns},
                {"equations", r.equations},
                {"restarts_run", r.histories.size()},
                {"best_restart", r.best_restart},
                {"histories", r.histories}};
    out["lower_bound"] = r.lower_bound ? json(*r.lower_bound) : json(nullptr);
    out["residual"] = r.status == SearchStatus::rejected_by_walk_bound ? json(nullptr) : json(r.best.residual);
    out["jacobian_rank"] = r.jacobian_rank ? json(*r.jacobian_rank) : json(nullptr);
    return out;
}

json to_json(const ApproxMeanReport& r) {
    json out = to_json(r.result);
    out["y"] = r.y;
    out["mean"] = r.mean;
    out["approx_sum"] = r.result.values;
    out["deviation"] = r.deviation;
    out["input_norm"] = r.input_norm;
    out["certificate"] = r.certificate;
    out["certified"] = r.certified;
    out["bound_holds"] = r.bound_holds;
    return out;
}

}  // namespace gsum
