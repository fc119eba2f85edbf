#include "gsum/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "gsum/error.hpp"
#include "gsum/protocols.hpp"

namespace gsum {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

double residual_to_ones(const Eigen::MatrixXd& product) {
    return (product.array() - 1.0).matrix().norm();
}

}  // namespace

Eigen::MatrixXd execution_product(std::span<const StepMatrix> steps, std::size_t n) {
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(idx(n), idx(n));
    for (const StepMatrix& w : steps) product = w.apply(product);
    return product;
}

VerifyReport verify_factorization(const Graph& g, std::span<const StepMatrix> steps, double tol) {
    for (const StepMatrix& w : steps) {
        if (!(w.graph() == g)) throw InvalidArgument("step matrix belongs to a different graph");
    }
    VerifyReport report;
    report.residual = residual_to_ones(execution_product(steps, g.n()));
    report.threshold = tol * static_cast<double>(g.n());
    report.pass = report.residual <= report.threshold;
    return report;
}

VerifyReport verify_factorization(GraphPtr g, std::span<const Eigen::MatrixXd> steps, double tol) {
    std::vector<StepMatrix> checked;
    checked.reserve(steps.size());
    for (std::size_t t = 0; t < steps.size(); ++t) {
        try {
            checked.push_back(StepMatrix::from_dense(g, steps[t]));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("step " + std::to_string(t + 1) + ": " + e.what());
        }
    }
    return verify_factorization(*g, checked, tol);
}

Factorization eigen_factorization(GraphPtr g, const Spectrum& spec) {
    Schedule schedule = hoffman_protocol(g, spec);
    Factorization f;
    f.graph = g;
    f.steps = std::move(schedule.steps);
    const double scale = schedule.final_scale.value_or(1.0);
    if (f.steps.empty()) {
        // A single vertex: the empty product is already J.
        f.residual = residual_to_ones(execution_product(f.steps, g->n()));
        return f;
    }
    f.steps.front() = f.steps.front().scaled(scale);
    f.residual = residual_to_ones(execution_product(f.steps, g->n()));
    return f;
}

CirculantVector make_circulant_vector(std::size_t n, std::vector<std::size_t> support, std::vector<double> weights) {
    if (weights.size() != n) throw InvalidArgument("circulant weights must have length n");
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.empty() || support.front() != 0) throw InvalidArgument("circulant support must contain 0");
    for (std::size_t k = 0; k < n; ++k) {
        if (weights[k] != 0.0 && !std::binary_search(support.begin(), support.end(), k)) {
            throw InvalidArgument("circulant weight at offset " + std::to_string(k) + " lies off the support");
        }
    }
    CirculantVector v;
    v.n = n;
    v.support = std::move(support);
    v.weights = std::move(weights);
    v.fourier.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> acc = 0.0;
        for (std::size_t s : v.support) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * s) % n) / static_cast<double>(n);
            acc += v.weights[s] * std::polar(1.0, angle);
        }
        v.fourier[j] = acc;
    }
    return v;
}

std::vector<CirculantVector> circulant_reduce(std::size_t n, std::span<const std::size_t> connections,
                                              std::span<const Eigen::MatrixXd> steps) {
    std::vector<std::size_t> support{0};
    for (std::size_t s : connections) {
        if (s == 0 || s >= n) throw InvalidArgument("connection " + std::to_string(s) + " outside 1..n-1");
        support.push_back(s);
    }
    std::vector<CirculantVector> out;
    for (std::size_t t = 0; t < steps.size(); ++t) {
        const Eigen::MatrixXd& w = steps[t];
        if (w.rows() != idx(n) || w.cols() != idx(n)) {
            throw InvalidArgument("step " + std::to_string(t + 1) + " is not " + std::to_string(n) + "x" +
                                  std::to_string(n));
        }
        const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
        for (std::size_t u = 0; u + 1 < n; ++u) {
            for (std::size_t v = 0; v < n; ++v) {
                if (std::abs(w(idx(u + 1), idx((v + 1) % n)) - w(idx(u), idx(v))) > 1e-12 * scale) {
                    throw InvalidArgument("step " + std::to_string(t + 1) + " is not circulant: rows " +
                                          std::to_string(u) + " and " + std::to_string(u + 1) + " differ at column " +
                                          std::to_string(v));
                }
            }
        }
        std::vector<double> column(n);
        for (std::size_t k = 0; k < n; ++k) column[k] = w(idx(k), 0);
        try {
            out.push_back(make_circulant_vector(n, support, std::move(column)));
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("step " + std::to_string(t + 1) + ": " + e.what());
        }
    }
    return out;
}

std::vector<CirculantVector> circulant_reduce(std::size_t n, std::span<const std::size_t> connections,
                                              std::span<const StepMatrix> steps) {
    std::vector<Eigen::MatrixXd> dense;
    dense.reserve(steps.size());
    for (const StepMatrix& w : steps) dense.push_back(w.dense());
    return circulant_reduce(n, connections, std::span<const Eigen::MatrixXd>(dense));
}

FourierCoverReport fourier_cover_check(std::span<const CirculantVector> vectors, double tol) {
    if (vectors.empty()) throw InvalidArgument("empty schedule: the DC product is undefined");
    const std::size_t n = vectors.front().n;
    for (const auto& v : vectors) {
        if (v.n != n) throw InvalidArgument("circulant vectors disagree on n");
    }
    FourierCoverReport report;
    report.n = n;
    report.tol = tol;
    const double root_n = std::sqrt(static_cast<double>(n));
    report.dc_product = 1.0;
    for (const auto& v : vectors) report.dc_product *= v.fourier[0];
    report.dc_ok = std::abs(report.dc_product - static_cast<double>(n)) <= tol * static_cast<double>(n);
    bool all_covered = true;
    for (std::size_t j = 1; j < n; ++j) {
        FourierRow row;
        row.j = j;
        row.magnitude = std::abs(vectors[0].fourier[j]) / root_n;
        for (std::size_t k = 1; k < vectors.size(); ++k) {
            const double mag = std::abs(vectors[k].fourier[j]) / root_n;
            if (mag < row.magnitude) {
                row.magnitude = mag;
                row.best_step = k;
            }
        }
        row.covered = row.magnitude <= tol;
        all_covered = all_covered && row.covered;
        report.rows.push_back(row);
    }
    report.pass = all_covered && report.dc_ok;
    return report;
}

std::optional<std::size_t> reachability_lower_bound(const Graph& g) { return metrics(g).diameter; }

namespace {

// Support positions (row, col) of a step matrix: diagonal first, then edges.
struct Mask {
    std::vector<std::pair<Index, Index>> cells;
    std::size_t n_diag = 0;
};

Mask build_mask(const Graph& g) {
    Mask mask;
    for (Vertex v = 0; v < g.n(); ++v) mask.cells.emplace_back(idx(v), idx(v));
    mask.n_diag = g.n();
    for (const Edge& e : g.edges()) mask.cells.emplace_back(idx(e.to), idx(e.from));
    return mask;
}

class AlternatingLeastSquares {
public:
    AlternatingLeastSquares(GraphPtr g, std::vector<Eigen::MatrixXd> steps, double ridge)
        : g_(std::move(g)), mask_(build_mask(*g_)), steps_(std::move(steps)), ridge_(ridge) {}

    double residual() const { return residual_to_ones(product_range(0, steps_.size())); }

    // One pass over all steps; a step update that would raise the residual is discarded.
    double sweep() {
        double current = residual();
        for (std::size_t t = 0; t < steps_.size(); ++t) {
            const Eigen::MatrixXd left = product_range(t + 1, steps_.size());
            const Eigen::MatrixXd right = product_range(0, t);
            const Eigen::MatrixXd previous = steps_[t];
            steps_[t] = solve(left, right);
            const double updated = residual();
            if (updated > current) {
                steps_[t] = previous;
            } else {
                current = updated;
            }
        }
        return current;
    }

    std::vector<StepMatrix> steps() const {
        std::vector<StepMatrix> out;
        for (const auto& w : steps_) out.push_back(StepMatrix::from_dense(g_, w));
        return out;
    }

    // Columns: derivative of vec(product) with respect to each masked weight.
    Eigen::MatrixXd jacobian() const {
        const std::size_t n = g_->n();
        const Index k = idx(mask_.cells.size());
        Eigen::MatrixXd jac(idx(n * n), k * idx(steps_.size()));
        for (std::size_t t = 0; t < steps_.size(); ++t) {
            const Eigen::MatrixXd left = product_range(t + 1, steps_.size());
            const Eigen::MatrixXd right = product_range(0, t);
            for (Index c = 0; c < k; ++c) {
                const auto [u, v] = mask_.cells[static_cast<std::size_t>(c)];
                const Eigen::MatrixXd block = left.col(u) * right.row(v);
                jac.col(idx(t) * k + c) = Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
            }
        }
        return jac;
    }

private:
    // steps_[end-1] * ... * steps_[begin]
    Eigen::MatrixXd product_range(std::size_t begin, std::size_t end) const {
        const Index n = idx(g_->n());
        Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
        for (std::size_t t = begin; t < end; ++t) p = steps_[t] * p;
        return p;
    }

    // argmin ||L W R - J||^2 + ridge ||W||^2 over W on the mask. The normal
    // matrix factorises: G[(u,v),(u',v')] = (L^T L)(u,u') (R R^T)(v,v').
    Eigen::MatrixXd solve(const Eigen::MatrixXd& left, const Eigen::MatrixXd& right) const {
        const Eigen::MatrixXd ll = left.transpose() * left;
        const Eigen::MatrixXd rr = right * right.transpose();
        const Eigen::VectorXd lsum = left.colwise().sum().transpose();
        const Eigen::VectorXd rsum = right.rowwise().sum();
        const Index k = idx(mask_.cells.size());
        Eigen::MatrixXd gram(k, k);
        Eigen::VectorXd rhs(k);
        for (Index a = 0; a < k; ++a) {
            const auto [u, v] = mask_.cells[static_cast<std::size_t>(a)];
            rhs(a) = lsum(u) * rsum(v);
            for (Index b = 0; b < k; ++b) {
                const auto [u2, v2] = mask_.cells[static_cast<std::size_t>(b)];
                gram(a, b) = ll(u, u2) * rr(v, v2);
            }
            gram(a, a) += ridge_;
        }
        const Eigen::VectorXd w = gram.ldlt().solve(rhs);
        const Index n = idx(g_->n());
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
        for (Index a = 0; a < k; ++a) {
            const auto [u, v] = mask_.cells[static_cast<std::size_t>(a)];
            out(u, v) = w(a);
        }
        return out;
    }

    GraphPtr g_;
    Mask mask_;
    std::vector<Eigen::MatrixXd> steps_;
    double ridge_;
};

std::vector<Eigen::MatrixXd> random_steps(const Graph& g, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    const Mask mask = build_mask(g);
    std::vector<Eigen::MatrixXd> steps;
    for (std::size_t t = 0; t < m; ++t) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(idx(g.n()), idx(g.n()));
        for (const auto& [u, v] : mask.cells) w(u, v) = dist(rng);
        steps.push_back(std::move(w));
    }
    return steps;
}

constexpr std::size_t kMaxJacobianEntries = std::size_t{1} << 22;

}  // namespace

SearchResult search_factorization(GraphPtr g, std::size_t m, const SearchOptions& options) {
    if (m == 0) throw InvalidArgument("target length must be at least 1");
    if (options.budget == 0) throw InvalidArgument("search budget must be positive");
    const std::size_t n = g->n();
    SearchResult result;
    result.equations = n * n;
    result.unknowns = m * (n + g->edge_count());
    result.lower_bound = reachability_lower_bound(*g);
    result.best.graph = g;
    if (!result.lower_bound || m < *result.lower_bound) {
        result.status = SearchStatus::rejected_by_walk_bound;
        result.best.residual = std::numeric_limits<double>::infinity();
        return result;
    }
    if (!options.warm_start.empty() && options.warm_start.size() != m) {
        throw InvalidArgument("warm start has " + std::to_string(options.warm_start.size()) + " steps, target is " +
                              std::to_string(m));
    }

    const double threshold = options.tol * static_cast<double>(n);
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
    const std::size_t per_restart = std::max<std::size_t>(1, options.budget / restarts);
    double best = std::numeric_limits<double>::infinity();
    std::optional<AlternatingLeastSquares> best_solver;

    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<Eigen::MatrixXd> start;
        if (r == 0 && !options.warm_start.empty()) {
            for (const auto& w : options.warm_start) start.push_back(w.dense());
        } else {
            start = random_steps(*g, m, options.seed + r);
        }
        AlternatingLeastSquares solver(g, std::move(start), options.ridge);
        std::vector<double> history{solver.residual()};
        for (std::size_t it = 0; it < per_restart && history.back() > threshold; ++it) {
            const double before = history.back();
            history.push_back(solver.sweep());
            // Stalled: the last sweep changed nothing measurable.
            if (before - history.back() <= 1e-15 * std::max(1.0, before)) break;
        }
        const double final_residual = history.back();
        result.histories.push_back(std::move(history));
        // Ties keep the earlier restart.
        if (final_residual < best) {
            best = final_residual;
            result.best_restart = r;
            best_solver = std::move(solver);
        }
        if (best <= threshold) break;
    }

    result.best.steps = best_solver->steps();
    result.best.residual = residual_to_ones(execution_product(result.best.steps, n));
    result.status = result.best.residual <= threshold ? SearchStatus::found : SearchStatus::not_found;
    if (result.equations * result.unknowns <= kMaxJacobianEntries) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(best_solver->jacobian());
        qr.setThreshold(1e-9);
        result.jacobian_rank = static_cast<std::size_t>(qr.rank());
    }
    return result;
}

SymmetrizeResult cayley_symmetrize(GraphPtr g, const Factorization& f) {
    const auto connections = g->circulant_connections();
    if (!connections) throw PreconditionError("graph is not circulant under its labeling");
    const std::size_t n = g->n();
    SymmetrizeResult out;
    out.residual_before = residual_to_ones(execution_product(f.steps, n));
    out.projected.graph = g;
    for (const StepMatrix& w : f.steps) {
        if (!(w.graph() == *g)) throw InvalidArgument("factorization belongs to a different graph");
        StepMatrix projected(g);
        double diag = 0.0;
        for (Vertex v = 0; v < n; ++v) diag += w.diagonal(v);
        diag /= static_cast<double>(n);
        for (Vertex v = 0; v < n; ++v) projected.set_diagonal(v, diag);
        for (std::size_t s : *connections) {
            double mean = 0.0;
            for (Vertex v = 0; v < n; ++v) mean += w.edge_weight(*g->edge_id(v, (v + s) % n));
            mean /= static_cast<double>(n);
            for (Vertex v = 0; v < n; ++v) projected.set_edge_weight(*g->edge_id(v, (v + s) % n), mean);
        }
        out.projected.steps.push_back(std::move(projected));
    }
    out.residual_after = residual_to_ones(execution_product(out.projected.steps, n));
    out.projected.residual = out.residual_after;
    return out;
}

namespace {

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_blocks(std::ostringstream& out, std::span<const StepMatrix> steps) {
    for (std::size_t t = 0; t < steps.size(); ++t) {
        const StepMatrix& w = steps[t];
        const Graph& g = w.graph();
        out << "step " << t + 1 << " nnz=" << g.n() + g.edge_count() << '\n';
        // Row-major over the support.
        for (Vertex u = 0; u < g.n(); ++u) {
            auto sources = g.in_neighbors(u);
            auto ids = g.in_edges(u);
            bool diag_done = false;
            for (std::size_t i = 0; i <= sources.size(); ++i) {
                if (!diag_done && (i == sources.size() || sources[i] > u)) {
                    out << u << ' ' << u << ' ' << format_real(w.diagonal(u)) << '\n';
                    diag_done = true;
                }
                if (i < sources.size()) out << u << ' ' << sources[i] << ' ' << format_real(w.edge_weight(ids[i])) << '\n';
            }
        }
    }
}

}  // namespace

std::string to_text(const Factorization& f) {
    std::ostringstream out;
    out << "factorization n=" << f.graph->n() << " m=" << f.steps.size() << " residual=" << format_real(f.residual)
        << '\n';
    write_blocks(out, f.steps);
    return out.str();
}

std::string to_text(const Schedule& s) {
    std::ostringstream out;
    out << "schedule n=" << s.graph->n() << " m=" << s.steps.size()
        << " scale=" << format_real(s.final_scale.value_or(1.0)) << '\n';
    write_blocks(out, s.steps);
    return out.str();
}

namespace {

std::string field_value(const std::string& token, const std::string& key, std::size_t line) {
    if (!token.starts_with(key + "=")) throw ParseError("expected field '" + key + "=', got '" + token + "'", line);
    return token.substr(key.size() + 1);
}

double parse_real(const std::string& text, std::size_t line, const char* what) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size()) throw ParseError(std::string("field '") + what + "': bad number '" + text + "'", line);
    return value;
}

std::size_t parse_size(const std::string& text, std::size_t line, const char* what) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(std::string("field '") + what + "': expected a non-negative integer, got '" + text + "'", line);
    }
    return static_cast<std::size_t>(std::stoull(text));
}

}  // namespace

ParsedSteps parse_steps(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto next_tokens = [&]() -> std::optional<std::vector<std::string>> {
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream fields(line);
            std::vector<std::string> tokens;
            std::string token;
            while (fields >> token) tokens.push_back(token);
            if (!tokens.empty() && !tokens.front().starts_with('#')) return tokens;
        }
        return std::nullopt;
    };

    ParsedSteps out;
    auto header = next_tokens();
    if (!header || header->size() != 4 || ((*header)[0] != "factorization" && (*header)[0] != "schedule")) {
        throw ParseError("expected header 'factorization n=<n> m=<m> residual=<r>' or 'schedule n=<n> m=<m> scale=<s>'",
                         std::max<std::size_t>(line_no, 1));
    }
    const bool is_schedule = (*header)[0] == "schedule";
    out.n = parse_size(field_value((*header)[1], "n", line_no), line_no, "n");
    if (out.n == 0) throw ParseError("field 'n': must be positive", line_no);
    const std::size_t m = parse_size(field_value((*header)[2], "m", line_no), line_no, "m");
    if (is_schedule) {
        out.scale = parse_real(field_value((*header)[3], "scale", line_no), line_no, "scale");
    } else {
        out.residual = parse_real(field_value((*header)[3], "residual", line_no), line_no, "residual");
    }
    for (std::size_t t = 1; t <= m; ++t) {
        auto block = next_tokens();
        if (!block) throw ParseError("missing block for step " + std::to_string(t), line_no);
        if (block->size() != 3 || (*block)[0] != "step" || parse_size((*block)[1], line_no, "step") != t) {
            throw ParseError("expected 'step " + std::to_string(t) + " nnz=<k>'", line_no);
        }
        const std::size_t nnz = parse_size(field_value((*block)[2], "nnz", line_no), line_no, "nnz");
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(idx(out.n), idx(out.n));
        for (std::size_t e = 0; e < nnz; ++e) {
            auto triple = next_tokens();
            if (!triple) throw ParseError("step " + std::to_string(t) + " ends early", line_no);
            if (triple->size() != 3) throw ParseError("expected 'i j w'", line_no);
            const std::size_t i = parse_size((*triple)[0], line_no, "i");
            const std::size_t j = parse_size((*triple)[1], line_no, "j");
            if (i >= out.n || j >= out.n) throw ParseError("index outside 0.." + std::to_string(out.n - 1), line_no);
            w(idx(i), idx(j)) = parse_real((*triple)[2], line_no, "w");
        }
        out.steps.push_back(std::move(w));
    }
    if (next_tokens()) throw ParseError("trailing content after the last step", line_no);
    return out;
}

}  // namespace gsum
