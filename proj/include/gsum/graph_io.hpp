#pragma once

#include <filesystem>
#include <string>

#include "gsum/graph.hpp"

namespace gsum {

enum class GraphFormat { text, json };

// Text form: "n <count> directed <0|1>" then one "u v" edge per line.
// Every stored directed edge is written, so undirected graphs list both directions.
std::string to_text(const Graph& g);
// JSON form: {"n": ..., "directed": ..., "edges": [[u, v], ...]}.
std::string to_json_text(const Graph& g);

// Either format; JSON is recognised by a leading '{'. Throws ParseError.
Graph parse_graph(const std::string& content);

// Format chosen by extension: ".json" writes JSON, anything else text.
void save_graph(const Graph& g, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);

}  // namespace gsum
