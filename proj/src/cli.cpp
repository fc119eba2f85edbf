#include "gsum/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsum/audit.hpp"
#include "gsum/error.hpp"
#include "gsum/factorization.hpp"
#include "gsum/graph_io.hpp"
#include "gsum/protocols.hpp"
#include "gsum/report.hpp"
#include "gsum/spectral.hpp"

namespace gsum::cli {

namespace {

using nlohmann::json;

// Everything a run needs; loadable from JSON with --config, flags override.
struct ExperimentConfig {
    std::string graph_file;
    std::string family;
    std::string protocol = "hoffman";
    std::string input;  // default: "uniform <seed>"
    std::optional<std::size_t> m;
    std::size_t root = 0;
    std::string schedule_file;
    std::string schedule_out;
    double tol = kExactTolerance;
    std::optional<double> spectral_tol;
    bool trace = false;
    std::string out;
    std::uint64_t seed = 0;
};

void apply_config_file(const std::string& path, ExperimentConfig& c) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    json doc;
    try {
        doc = json::parse(in);
        if (doc.contains("graph")) {
            const json& g = doc.at("graph");
            if (g.is_string()) {
                c.graph_file = g.get<std::string>();
            } else {
                if (g.contains("file")) c.graph_file = g.at("file").get<std::string>();
                if (g.contains("family")) c.family = g.at("family").get<std::string>();
            }
        }
        if (doc.contains("protocol")) c.protocol = doc.at("protocol").get<std::string>();
        if (doc.contains("input")) c.input = doc.at("input").get<std::string>();
        if (doc.contains("m")) c.m = doc.at("m").get<std::size_t>();
        if (doc.contains("root")) c.root = doc.at("root").get<std::size_t>();
        if (doc.contains("schedule_file")) c.schedule_file = doc.at("schedule_file").get<std::string>();
        if (doc.contains("schedule_out")) c.schedule_out = doc.at("schedule_out").get<std::string>();
        if (doc.contains("tol")) c.tol = doc.at("tol").get<double>();
        if (doc.contains("spectral_tol")) c.spectral_tol = doc.at("spectral_tol").get<double>();
        if (doc.contains("trace")) c.trace = doc.at("trace").get<bool>();
        if (doc.contains("out")) c.out = doc.at("out").get<std::string>();
        if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw InvalidArgument("config " + path + ": " + e.what());
    }
}

class Output {
public:
    Output(std::ostream& stream, std::string path) : stream_(stream), path_(std::move(path)) {}

    void write(const std::string& text) const {
        if (path_.empty()) {
            stream_ << text;
            return;
        }
        std::ofstream file(path_, std::ios::binary);
        if (!file) throw Error("cannot open " + path_ + " for writing");
        file << text;
    }

    void write(const json& doc) const { write(doc.dump(2) + "\n"); }

private:
    std::ostream& stream_;
    std::string path_;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot open " + path + " for writing");
    file << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Spectrum spectrum_of(const Graph& g, std::optional<double> tol) { return adjacency_spectrum(g, tol); }

int cmd_generate(const std::vector<std::string>& tokens, const std::string& format, const Output& out) {
    const CayleySpec spec = parse_family(std::span<const std::string>(tokens));
    const Graph g = build_family(spec);
    out.write(format == "json" ? to_json_text(g) : to_text(g));
    return kPass;
}

int cmd_spectrum(const std::string& graph_file, std::optional<double> tol, const Output& out) {
    const Graph g = load_graph(graph_file);
    const GraphMetrics gm = metrics(g);
    json report;
    report["graph"] = graph_file;
    report["n"] = g.n();
    report["degree"] = gm.degree ? json(*gm.degree) : json(nullptr);
    report["diameter"] = gm.diameter ? json(*gm.diameter) : json(nullptr);
    try {
        const Spectrum spec = spectrum_of(g, tol);
        report["spectrum"] = to_json(spec);
        report["m"] = spec.m();
        report["tol"] = spec.tol;
        if (gm.diameter) report["gap"] = static_cast<long long>(spec.m()) - static_cast<long long>(*gm.diameter);
        if (spec.connected()) {
            const DiameterBound bound = diameter_bound(spec);
            report["diameter_bound"] = {{"m", bound.m}, {"certificate", bound.certificate},
                                        {"threshold", g.n() > 1 ? 1.0 / static_cast<double>(g.n() - 1) : 0.0}};
        }
    } catch (const Error& e) {
        report["error"] = e.what();
        out.write(report);
        return kCheckFailed;
    }
    out.write(report);
    return kPass;
}

int cmd_run(ExperimentConfig c, std::ostream& stdout_stream) {
    const Output out(stdout_stream, c.out);
    if (c.graph_file.empty() == c.family.empty()) {
        throw InvalidArgument("give exactly one of --graph <file> or --family <spec>");
    }
    std::optional<CayleySpec> spec;
    GraphPtr g;
    if (!c.family.empty()) {
        spec = parse_family(c.family);
        g = share(build_family(*spec));
    } else {
        g = share(load_graph(c.graph_file));
    }
    const std::string input_spec = c.input.empty() ? "uniform " + std::to_string(c.seed) : c.input;
    const std::vector<double> x = make_input(input_spec, g->n());
    const GraphMetrics gm = metrics(*g);
    const RunOptions options{c.trace};

    json report;
    report["graph"] = spec ? describe(*spec) : c.graph_file;
    report["n"] = g->n();
    report["diameter"] = gm.diameter ? json(*gm.diameter) : json(nullptr);
    report["input"] = input_spec;
    report["tolerances"] = {{"exact_rel_tol", c.tol},
                            {"spectral_tol", c.spectral_tol ? json(*c.spectral_tol) : json("1e-8*max(1,d)")}};

    try {
        if (c.protocol == "approx") {
            if (!c.m) throw InvalidArgument("approx needs --m");
            const Spectrum s = spectrum_of(*g, c.spectral_tol);
            const ApproxMeanProtocol p = approx_mean_protocol(g, s, *c.m);
            const ApproxMeanReport r = run_approx_mean(p, x, options);
            report["protocol"] = describe(p.protocol);
            report["polynomial"] = to_json(p.polynomial);
            report["result"] = to_json(r);
            report["certificate"] = r.certificate;
            report["certified"] = r.certified;
            report["pass"] = r.certified && r.bound_holds;
            out.write(report);
            return r.certified && r.bound_holds ? kPass : kCheckFailed;
        }

        Protocol p;
        if (c.protocol == "hoffman") {
            const Spectrum spec_g = spectrum_of(*g, c.spectral_tol);
            if (!c.schedule_out.empty()) write_file(c.schedule_out, to_text(hoffman_protocol(g, spec_g)));
            p = hoffman_round_protocol(g, spec_g);
        } else if (c.protocol == "tree") {
            p = tree_protocol(g, c.root);
        } else if (c.protocol == "diam2") {
            p = diameter2_protocol(g);
        } else if (c.protocol == "product") {
            if (!spec || spec->kind != Family::product) throw InvalidArgument("product needs --family product ...");
            auto first = best_protocol(spec->factors[0]);
            auto second = best_protocol(spec->factors[1]);
            if (!first || !second) throw PreconditionError("a factor has no exact protocol");
            p = product_protocol(first->protocol, second->protocol);
        } else if (c.protocol == "schedule") {
            if (c.schedule_file.empty()) throw InvalidArgument("schedule needs --schedule-file");
            const ParsedSteps parsed = parse_steps(read_file(c.schedule_file));
            if (parsed.n != g->n()) throw InvalidArgument("schedule is for n = " + std::to_string(parsed.n));
            Schedule schedule;
            schedule.graph = g;
            for (const auto& w : parsed.steps) schedule.steps.push_back(StepMatrix::from_dense(g, w));
            schedule.final_scale = parsed.scale;
            p = schedule_protocol(schedule);
        } else {
            throw InvalidArgument("unknown protocol '" + c.protocol +
                                  "' (hoffman | tree | diam2 | product | approx | schedule)");
        }
        const ProtocolResult r = run_protocol(*g, p, x, options);
        const bool pass = r.max_rel_error <= c.tol;
        report["protocol"] = describe(p);
        report["result"] = to_json(r);
        report["pass"] = pass;
        if (gm.diameter) report["gap"] = static_cast<long long>(r.rounds) - static_cast<long long>(*gm.diameter);
        out.write(report);
        return pass ? kPass : kCheckFailed;
    } catch (const PreconditionError& e) {
        report["protocol"] = c.protocol;
        report["error"] = e.what();
        report["pass"] = false;
        out.write(report);
        return kCheckFailed;
    }
}

int cmd_factor(const std::string& graph_file, const std::string& action, const std::vector<std::string>& rest,
               std::optional<double> tol, std::optional<double> spectral_tol, std::size_t restarts,
               const std::string& out_path, std::ostream& stdout_stream) {
    const GraphPtr g = share(load_graph(graph_file));
    const double pass_tol = tol.value_or(kDefaultPassTolerance);
    const Output report_out(stdout_stream, "");
    auto need_args = [&](std::size_t count, const char* usage) {
        if (rest.size() != count) throw InvalidArgument(std::string("usage: factor <graph> ") + usage);
    };

    if (action == "eigen") {
        need_args(0, "eigen");
        const Factorization f = eigen_factorization(g, spectrum_of(*g, spectral_tol));
        const VerifyReport v = verify_factorization(*g, f.steps, pass_tol);
        if (out_path.empty()) {
            stdout_stream << to_text(f);
        } else {
            write_file(out_path, to_text(f));
            json report = to_json(v);
            report["length"] = f.length();
            report["tol"] = pass_tol;
            report_out.write(report);
        }
        return v.pass ? kPass : kCheckFailed;
    }
    if (action == "verify") {
        need_args(1, "verify <factorization-file>");
        const ParsedSteps parsed = parse_steps(read_file(rest[0]));
        if (parsed.n != g->n()) throw InvalidArgument("factorization is for n = " + std::to_string(parsed.n));
        json report;
        report["tol"] = pass_tol;
        report["length"] = parsed.steps.size();
        try {
            const VerifyReport v = verify_factorization(g, parsed.steps, pass_tol);
            report.update(to_json(v));
            report_out.write(report);
            return v.pass ? kPass : kCheckFailed;
        } catch (const InvalidArgument& e) {
            report["pass"] = false;
            report["error"] = e.what();
            report_out.write(report);
            return kCheckFailed;
        }
    }
    if (action == "search") {
        need_args(3, "search <m> <budget> <seed>");
        SearchOptions options;
        const std::size_t m = std::stoull(rest[0]);
        options.budget = std::stoull(rest[1]);
        options.seed = std::stoull(rest[2]);
        options.restarts = restarts;
        options.tol = pass_tol;
        const SearchResult r = search_factorization(g, m, options);
        json report = to_json(r);
        report["tol"] = pass_tol;
        report["target_length"] = m;
        if (!out_path.empty() && r.status != SearchStatus::rejected_by_walk_bound) write_file(out_path, to_text(r.best));
        report_out.write(report);
        return r.status == SearchStatus::found ? kPass : kCheckFailed;
    }
    if (action == "fourier") {
        need_args(0, "fourier");
        const auto connections = g->circulant_connections();
        if (!connections) throw PreconditionError("graph is not circulant under its labeling");
        const Factorization f = eigen_factorization(g, spectrum_of(*g, spectral_tol));
        const auto vectors = circulant_reduce(g->n(), *connections, std::span<const StepMatrix>(f.steps));
        const FourierCoverReport cover = fourier_cover_check(vectors, pass_tol);
        const VerifyReport v = verify_factorization(*g, f.steps, pass_tol);
        json report = {{"cover", to_json(cover)}, {"verify", to_json(v)}, {"length", f.length()}};
        report["agree"] = cover.pass == v.pass;
        report_out.write(report);
        return cover.pass && v.pass ? kPass : kCheckFailed;
    }
    if (action == "symmetrize") {
        need_args(1, "symmetrize <factorization-file>");
        const ParsedSteps parsed = parse_steps(read_file(rest[0]));
        if (parsed.n != g->n()) throw InvalidArgument("factorization is for n = " + std::to_string(parsed.n));
        Factorization f;
        f.graph = g;
        for (const auto& w : parsed.steps) f.steps.push_back(StepMatrix::from_dense(g, w));
        const SymmetrizeResult r = cayley_symmetrize(g, f);
        if (!out_path.empty()) write_file(out_path, to_text(r.projected));
        report_out.write(json{{"residual_before", r.residual_before}, {"residual_after", r.residual_after}});
        return kPass;
    }
    throw InvalidArgument("unknown factor action '" + action + "' (verify | eigen | search | fourier | symmetrize)");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int cmd_audit(const std::string& families, std::size_t lo, std::size_t hi, bool products, std::size_t product_max_n,
              const Output& out) {
    const auto names = split_list(families);
    const auto instances = family_instances(names, lo, hi);
    std::vector<AuditRow> rows;
    for (const auto& spec : instances) rows.push_back(audit_graph(spec));
    if (products) {
        for (const auto& spec : product_instances(instances, product_max_n)) rows.push_back(audit_graph(spec));
    }
    out.write(audit_csv(rows));
    bool all_ok = true;
    for (const auto& r : rows) all_ok = all_ok && r.best_rounds.has_value();
    return all_ok ? kPass : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Global-sum protocols on regular networks"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<double> tol;
    std::optional<double> spectral_tol;
    std::uint64_t seed = 0;
    bool trace = false;
    std::string out_path;
    std::string config_path;
    auto* tol_opt = app.add_option("--tol", tol, "Primary tolerance of the command");
    app.add_option("--spectral-tol", spectral_tol, "Eigenvalue clustering tolerance");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for generated inputs");
    auto* trace_opt = app.add_flag("--trace", trace, "Record per-round states");
    auto* out_opt = app.add_option("--out", out_path, "Write the report to this path");
    app.add_option("--config", config_path, "ExperimentConfig JSON for run");

    auto* generate = app.add_subcommand("generate", "Write a graph file for a family");
    std::vector<std::string> family_tokens;
    std::string format = "text";
    generate->add_option("family", family_tokens, "e.g. cycle 5 | product cycle 5 complete 2 | circulant 9 1,2")
        ->required();
    generate->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));

    auto* spectrum = app.add_subcommand("spectrum", "Distinct eigenvalues, diameter and the Chebyshev bound");
    std::string spectrum_graph;
    spectrum->add_option("graph", spectrum_graph, "Graph file")->required();

    auto* run_cmd = app.add_subcommand("run", "Run a protocol and check the global sum");
    ExperimentConfig cfg_flags;
    std::size_t m_value = 0;
    auto* graph_opt = run_cmd->add_option("--graph", cfg_flags.graph_file, "Graph file");
    auto* family_opt = run_cmd->add_option("--family", cfg_flags.family, "Family spec, e.g. \"product cycle 5 complete 2\"");
    auto* protocol_opt = run_cmd->add_option("--protocol", cfg_flags.protocol, "hoffman | tree | diam2 | product | approx | schedule");
    auto* input_opt = run_cmd->add_option("--input", cfg_flags.input, "ones | unit k | uniform seed | file path");
    auto* m_opt = run_cmd->add_option("--m", m_value, "Polynomial degree for approx");
    auto* root_opt = run_cmd->add_option("--root", cfg_flags.root, "Tree root");
    auto* sched_opt = run_cmd->add_option("--schedule-file", cfg_flags.schedule_file, "Triplet schedule to run");
    auto* sched_out_opt = run_cmd->add_option("--schedule-out", cfg_flags.schedule_out, "Export the hoffman schedule");

    auto* factor = app.add_subcommand("factor", "Factorizations of J on the support of A + I");
    std::string factor_graph;
    std::string factor_action;
    std::vector<std::string> factor_rest;
    std::size_t restarts = 4;
    factor->add_option("graph", factor_graph, "Graph file")->required();
    factor->add_option("action", factor_action, "verify <file> | eigen | search <m> <budget> <seed> | fourier | symmetrize <file>")
        ->required();
    factor->add_option("args", factor_rest, "Action arguments");
    factor->add_option("--restarts", restarts, "Random restarts for search");

    auto* audit = app.add_subcommand("audit", "CSV of rounds versus diameter over graph families");
    std::string families = "cycle";
    std::size_t lo = 1, hi = 8, product_max_n = 64;
    bool products = false;
    audit->add_option("--families", families, "Comma list: cycle, complete, hypercube, petersen");
    audit->add_option("--min", lo, "Smallest size parameter");
    audit->add_option("--max", hi, "Largest size parameter");
    audit->add_flag("--products", products, "Add all pairwise products");
    audit->add_option("--product-max-n", product_max_n, "Largest product vertex count");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kUsage;
    }

    try {
        const Output output(out, out_path);
        if (generate->parsed()) return cmd_generate(family_tokens, format, output);
        if (spectrum->parsed()) return cmd_spectrum(spectrum_graph, spectral_tol ? spectral_tol : tol, output);
        if (run_cmd->parsed()) {
            ExperimentConfig c;
            if (!config_path.empty()) apply_config_file(config_path, c);
            if (*graph_opt) c.graph_file = cfg_flags.graph_file;
            if (*family_opt) c.family = cfg_flags.family;
            if (*protocol_opt) c.protocol = cfg_flags.protocol;
            if (*input_opt) c.input = cfg_flags.input;
            if (*m_opt) c.m = m_value;
            if (*root_opt) c.root = cfg_flags.root;
            if (*sched_opt) c.schedule_file = cfg_flags.schedule_file;
            if (*sched_out_opt) c.schedule_out = cfg_flags.schedule_out;
            if (*tol_opt) c.tol = *tol;
            if (spectral_tol) c.spectral_tol = spectral_tol;
            if (*trace_opt) c.trace = trace;
            if (*out_opt) c.out = out_path;
            if (*seed_opt) c.seed = seed;
            return cmd_run(c, out);
        }
        if (factor->parsed()) {
            return cmd_factor(factor_graph, factor_action, factor_rest, tol, spectral_tol, restarts, out_path, out);
        }
        if (audit->parsed()) return cmd_audit(families, lo, hi, products, product_max_n, output);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        err << "check failed: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const UnsupportedError& e) {
        err << "check failed: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const ProtocolViolation& e) {
        err << "check failed: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const NonFiniteError& e) {
        err << "check failed: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: bad number: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace gsum::cli
