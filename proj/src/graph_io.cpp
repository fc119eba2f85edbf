#include "gsum/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gsum/error.hpp"

namespace gsum {

std::string to_text(const Graph& g) {
    std::ostringstream out;
    out << "n " << g.n() << " directed " << (g.directed() ? 1 : 0) << '\n';
    for (const Edge& e : g.edges()) out << e.from << ' ' << e.to << '\n';
    return out.str();
}

std::string to_json_text(const Graph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.from, e.to});
    nlohmann::json doc = {{"n", g.n()}, {"directed", g.directed()}, {"edges", std::move(edges)}};
    return doc.dump() + "\n";
}

namespace {

std::size_t parse_index(const std::string& token, std::size_t line, const char* field) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(std::string("field '") + field + "': expected a non-negative integer, got '" +
                             token + "'",
                         line);
    }
    try {
        return static_cast<std::size_t>(std::stoull(token));
    } catch (const std::exception&) {
        throw ParseError(std::string("field '") + field + "': value out of range", line);
    }
}

Graph build_checked(std::size_t n, std::vector<Edge> edges, bool directed,
                    const std::vector<std::size_t>& lines) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].from == edges[i].to) {
            throw ParseError("self-loop at vertex " + std::to_string(edges[i].from), lines[i]);
        }
        if (edges[i].from >= n || edges[i].to >= n) {
            throw ParseError("edge references a vertex >= n = " + std::to_string(n), lines[i]);
        }
    }
    return Graph(n, std::move(edges), directed);
}

Graph parse_text(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t n = 0;
    bool directed = false;
    std::vector<Edge> edges;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        std::string token;
        while (fields >> token) tokens.push_back(token);
        if (tokens.empty() || tokens.front().starts_with('#')) continue;
        if (!have_header) {
            if (tokens.size() != 4 || tokens[0] != "n" || tokens[2] != "directed") {
                throw ParseError("expected header 'n <count> directed <0|1>'", line_no);
            }
            n = parse_index(tokens[1], line_no, "n");
            if (n == 0) throw ParseError("field 'n': must be positive", line_no);
            if (tokens[3] != "0" && tokens[3] != "1") {
                throw ParseError("field 'directed': expected 0 or 1, got '" + tokens[3] + "'", line_no);
            }
            directed = tokens[3] == "1";
            have_header = true;
            continue;
        }
        if (tokens.size() != 2) throw ParseError("expected 'u v', got " + std::to_string(tokens.size()) + " fields", line_no);
        edges.push_back({parse_index(tokens[0], line_no, "u"), parse_index(tokens[1], line_no, "v")});
        lines.push_back(line_no);
    }
    if (!have_header) throw ParseError("missing header", line_no == 0 ? 1 : line_no);
    return build_checked(n, std::move(edges), directed, lines);
}

Graph parse_json(const std::string& content) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), 1);
    }
    try {
        const std::size_t n = doc.at("n").get<std::size_t>();
        if (n == 0) throw ParseError("field 'n': must be positive", 1);
        const bool directed = doc.at("directed").get<bool>();
        std::vector<Edge> edges;
        std::vector<std::size_t> lines;
        std::size_t index = 0;
        for (const auto& pair : doc.at("edges")) {
            if (!pair.is_array() || pair.size() != 2) {
                throw ParseError("edges[" + std::to_string(index) + "]: expected [u, v]", 1);
            }
            edges.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
            lines.push_back(1);
            ++index;
        }
        return build_checked(n, std::move(edges), directed, lines);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed graph document: ") + e.what(), 1);
    }
}

}  // namespace

Graph parse_graph(const std::string& content) {
    const auto first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{') return parse_json(content);
    return parse_text(content);
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << (path.extension() == ".json" ? to_json_text(g) : to_text(g));
    if (!out) throw Error("failed writing " + path.string());
}

Graph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_graph(buffer.str());
}

}  // namespace gsum
