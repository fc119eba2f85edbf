#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gsum/cli.hpp"
#include "gsum/factorization.hpp"
#include "gsum/graph_io.hpp"

using namespace gsum;
using nlohmann::json;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::filesystem::path tmp(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path(GSUM_TEST_TMP) / "cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string graph_file(const std::string& family, const std::string& name) {
    const auto path = tmp(name);
    std::istringstream tokens(family);
    std::vector<std::string> args{"generate"};
    for (std::string t; tokens >> t;) args.push_back(t);
    args.push_back("--out");
    args.push_back(path.string());
    REQUIRE(call(args).code == cli::kPass);
    return path.string();
}

}  // namespace

TEST_CASE("generate writes parseable graphs") {
    const Outcome text = call({"generate", "product", "cycle", "5", "complete", "2"});
    CHECK(text.code == cli::kPass);
    const Graph g = parse_graph(text.out);
    CHECK(g.n() == 10);
    const Outcome js = call({"generate", "petersen", "--format", "json"});
    CHECK(js.code == cli::kPass);
    CHECK(json::parse(js.out).at("n") == 10);
    CHECK(call({"generate", "cycle", "1"}).code == cli::kUsage);
    CHECK(call({"generate", "cycle", "5", "--format", "xml"}).code == cli::kUsage);
}

TEST_CASE("spectrum report") {
    const std::string pet = graph_file("petersen", "pet.txt");
    const Outcome o = call({"spectrum", pet});
    REQUIRE(o.code == cli::kPass);
    const json r = json::parse(o.out);
    CHECK(r.at("diameter") == 2);
    CHECK(r.at("m") == 2);
    CHECK(r.at("gap") == 0);
    CHECK(r.at("diameter_bound").at("m") == 2);
    CHECK(r.at("diameter_bound").at("certificate").get<double>() == doctest::Approx(9.0 / 89.0));
    CHECK(r.at("spectrum").at("entries").size() == 3);
}

TEST_CASE("run reports") {
    const Outcome o = call({"run", "--family", "petersen", "--protocol", "hoffman", "--input", "uniform 3"});
    REQUIRE(o.code == cli::kPass);
    const json r = json::parse(o.out);
    CHECK(r.at("pass") == true);
    CHECK(r.at("result").at("rounds") == 2);
    CHECK(r.at("gap") == 0);
    CHECK(r.at("protocol").at("name") == "hoffman");

    const Outcome prism = call({"run", "--family", "product cycle 5 complete 2", "--protocol", "product"});
    REQUIRE(prism.code == cli::kPass);
    CHECK(json::parse(prism.out).at("result").at("rounds") == 3);

    const Outcome approx = call({"run", "--family", "petersen", "--protocol", "approx", "--m", "2"});
    CHECK(approx.code == cli::kPass);
}

TEST_CASE("run refusals and usage errors") {
    const Outcome o = call({"run", "--family", "product cycle 5 complete 2", "--protocol", "diam2"});
    CHECK(o.code == cli::kCheckFailed);
    const json r = json::parse(o.out);
    CHECK(r.at("pass") == false);
    CHECK(r.at("error").get<std::string>().find("D = 3") != std::string::npos);

    CHECK(call({"run", "--family", "cycle 5", "--protocol", "gossip"}).code == cli::kUsage);
    CHECK(call({"run", "--protocol", "hoffman"}).code == cli::kUsage);
    CHECK(call({"frobnicate"}).code == cli::kUsage);
    CHECK(call({}).code == cli::kUsage);
    CHECK(call({"run", "--family", "cycle 5", "--input", "unit 9"}).code == cli::kUsage);
}

TEST_CASE("config files and flag overrides") {
    const auto cfg = tmp("exp.json");
    std::ofstream(cfg) << R"({"graph": {"family": "cycle 7"}, "protocol": "tree", "input": "ones", "root": 3})";
    const Outcome a = call({"--config", cfg.string(), "run"});
    REQUIRE(a.code == cli::kPass);
    CHECK(json::parse(a.out).at("result").at("rounds") == 6);
    const Outcome b = call({"--config", cfg.string(), "run", "--protocol", "hoffman"});
    REQUIRE(b.code == cli::kPass);
    CHECK(json::parse(b.out).at("result").at("rounds") == 3);
    std::ofstream(cfg) << R"({"protocol": 5})";
    CHECK(call({"--config", cfg.string(), "run", "--family", "cycle 5"}).code == cli::kUsage);
}

TEST_CASE("schedules can be exported and replayed") {
    const auto sched = tmp("c8.sched");
    REQUIRE(call({"run", "--family", "cycle 8", "--schedule-out", sched.string()}).code == cli::kPass);
    const std::string g8 = graph_file("cycle 8", "c8.txt");
    const Outcome o = call({"run", "--graph", g8, "--protocol", "schedule", "--schedule-file", sched.string()});
    REQUIRE(o.code == cli::kPass);
    CHECK(json::parse(o.out).at("result").at("rounds") == 4);
}

TEST_CASE("factor actions") {
    const std::string g = graph_file("cycle 8", "c8f.txt");
    const auto f = tmp("c8.fact");
    REQUIRE(call({"--out", f.string(), "factor", g, "eigen"}).code == cli::kPass);
    const Outcome v = call({"factor", g, "verify", f.string()});
    CHECK(v.code == cli::kPass);
    CHECK(json::parse(v.out).at("pass") == true);

    // Drop the last step: verification fails with exit 1.
    std::string text = slurp(f);
    text = text.substr(0, text.rfind("step 4"));
    text.replace(text.find("m=4"), 3, "m=3");
    const auto cut = tmp("c8cut.fact");
    std::ofstream(cut) << text;
    CHECK(call({"factor", g, "verify", cut.string()}).code == cli::kCheckFailed);

    const Outcome four = call({"factor", g, "fourier"});
    CHECK(four.code == cli::kPass);
    CHECK(json::parse(four.out).at("agree") == true);

    const Outcome rejected = call({"factor", g, "search", "3", "10", "1"});
    CHECK(rejected.code == cli::kCheckFailed);
    CHECK(json::parse(rejected.out).at("status") == "rejected by walk lower bound");

    const Outcome sym = call({"factor", g, "symmetrize", f.string()});
    CHECK(sym.code == cli::kPass);
    CHECK(call({"factor", g, "search", "3"}).code == cli::kUsage);
    CHECK(call({"factor", g, "invert"}).code == cli::kUsage);
    const std::string pet = graph_file("petersen", "petf.txt");
    CHECK(call({"factor", pet, "fourier"}).code == cli::kCheckFailed);
}

TEST_CASE("audit csv") {
    const Outcome o = call({"audit", "--families", "cycle,petersen", "--min", "3", "--max", "6"});
    REQUIRE(o.code == cli::kPass);
    std::istringstream lines(o.out);
    std::string comment, header, row;
    std::getline(lines, comment);
    std::getline(lines, header);
    CHECK(comment.starts_with("#"));
    CHECK(header == "graph,n,d,D,m,best_protocol,best_rounds,gap");
    std::size_t rows = 0;
    while (std::getline(lines, row)) {
        ++rows;
        CHECK(row.ends_with(",0"));
    }
    CHECK(rows == 5);
    CHECK(call({"audit", "--families", "mobius"}).code == cli::kUsage);
}

TEST_CASE("repeated invocations are byte-identical") {
    const std::vector<std::vector<std::string>> commands{
        {"run", "--family", "petersen", "--protocol", "hoffman", "--seed", "4", "--trace"},
        {"run", "--family", "hypercube 3", "--protocol", "tree", "--root", "5"},
        {"audit", "--families", "cycle,complete", "--min", "3", "--max", "5", "--products", "--product-max-n", "30"},
    };
    for (const auto& c : commands) {
        const Outcome a = call(c), b = call(c);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
    }
}
