#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "commform/errors.hpp"
#include "commform/io.hpp"
#include "support.hpp"

using namespace commform;
namespace fs = std::filesystem;

namespace {

constexpr auto Z = AttributeType::Zero;
constexpr auto O = AttributeType::One;

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("commform_io_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path put(const std::string& name, const std::string& text) const {
        write_file(path / name, text);
        return path / name;
    }
};

const fs::path kVillage = fs::path(COMMFORM_FIXTURES) / "village";

IngestConfig basic_config(const TempDir& dir, const std::string& attrs,
                          std::vector<std::pair<std::string, std::string>> relations) {
    IngestConfig c;
    c.label = "tmp";
    c.attributes = dir.put("attrs.csv", attrs);
    for (auto& [name, text] : relations) {
        c.relations.push_back({name, dir.put(name + ".csv", text), "edges"});
    }
    return c;
}

AttributedNetwork random_network(std::uint64_t seed, bool strategies) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 1 + rng() % 150;
    AttributedNetwork net;
    net.graph = testing::random_graph(n, 0.05, rng);
    const auto profiles = testing::random_profiles(n, rng);
    net.types = types_of(profiles);
    if (strategies) {
        std::vector<Strategy> s;
        for (const auto& p : profiles) {
            s.push_back(p.strategy);
        }
        net.strategies = s;
    }
    return net;
}

} // namespace

TEST_CASE("wealth attribute") {
    CHECK(derive_wealth_attribute(4, 3) == Z);
    CHECK(derive_wealth_attribute(9, 8) == O);
    CHECK(derive_wealth_attribute(0, 0) == Z);
    CHECK(derive_wealth_attribute(2, 0) == Z);
    CHECK(derive_wealth_attribute(3, 0) == O);
    CHECK(derive_wealth_attribute(6, 8) == Z);
    CHECK(derive_wealth_attribute(7, 8) == O);
    CHECK_THROWS_AS(derive_wealth_attribute(-1, 2), DataError);
    CHECK_THROWS_AS(derive_wealth_attribute(1, -2), DataError);
}

TEST_CASE("fixture ingestion unions included relations") {
    const auto config = read_ingest_config(kVillage / "config.json");
    const auto net = load_observed(config);
    CHECK(net.provenance == "fixture");
    CHECK(net.types == std::vector{Z, O, Z});
    CHECK(net.graph.edges() == std::vector<Edge>{{0, 1}, {1, 2}});

    auto reordered = config;
    std::reverse(reordered.relations.begin(), reordered.relations.end());
    CHECK(load_observed(reordered) == net);
    CHECK(load_observed(config) == net);

    auto with_money = config;
    with_money.excluded.clear();
    CHECK(load_observed(with_money).graph.edge_count() == 3);
}

TEST_CASE("ingestion edge cases") {
    TempDir dir;
    const std::string attrs = "id,rooms,beds\n1,1,0\n2,9,8\n3,4,3\n4,0,0\n";
    SUBCASE("empty relations keep every attributed node") {
        const auto net = load_observed(basic_config(dir, attrs, {{"a", "u,v\n"}, {"b", "u,v\n"}}));
        CHECK(net.size() == 4);
        CHECK(net.graph.edge_count() == 0);
    }
    SUBCASE("self-loops and repeats collapse") {
        const auto net =
            load_observed(basic_config(dir, attrs, {{"a", "u,v\n1,2\n2,1\n3,3\n"}, {"b", "u,v\n1,2\n"}}));
        CHECK(net.graph.edges() == std::vector<Edge>{{0, 1}});
    }
    SUBCASE("missing households are listed") {
        const auto c = basic_config(dir, attrs, {{"a", "u,v\n1,77\n88,2\n"}});
        try {
            load_observed(c);
            FAIL("expected a DataError");
        } catch (const DataError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("77") != std::string::npos);
            CHECK(msg.find("88") != std::string::npos);
        }
        auto lenient = c;
        lenient.drop_unattributed = true;
        CHECK(load_observed(lenient).graph.edge_count() == 0);
    }
    SUBCASE("malformed rows report their line") {
        const auto c = basic_config(dir, attrs, {{"a", "u,v\n1,2\n1,x\n"}});
        try {
            load_observed(c);
            FAIL("expected a ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
        const auto bad_attrs = basic_config(dir, "id,rooms,beds\n1,1,0\n2,9\n", {{"a", "u,v\n"}});
        CHECK_THROWS_AS(load_observed(bad_attrs), ParseError);
        const auto neg = basic_config(dir, "id,rooms,beds\n1,-1,0\n", {{"a", "u,v\n"}});
        CHECK_THROWS_AS(load_observed(neg), DataError);
    }
    SUBCASE("explicit type column") {
        auto c = basic_config(dir, "id,wealth\n5,1\n6,0\n", {{"a", "u,v\n5,6\n"}});
        c.rule = AttributeRule::ExplicitColumn;
        c.type_column = "wealth";
        const auto net = load_observed(c);
        CHECK(net.types == std::vector{O, Z});
        CHECK(net.graph.edge_count() == 1);
    }
    SUBCASE("adjacency matrix relation") {
        auto c = basic_config(dir, "id,type\n0,0\n1,1\n2,0\n", {});
        c.rule = AttributeRule::ExplicitColumn;
        c.relations.push_back({"m", dir.put("m.csv", "0,1,0\n1,0,0\n0,1,0\n"), "matrix"});
        CHECK(load_observed(c).graph.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
    }
    SUBCASE("member-level files contract to households") {
        auto c = basic_config(dir, attrs, {{"a", "u,v\n10,30\n20,30\n10,20\n"}});
        c.household_map = dir.put("map.csv", "member,household\n10,1\n20,1\n30,2\n");
        CHECK(load_observed(c).graph.edges() == std::vector<Edge>{{0, 1}});
        c.household_map = dir.put("map.csv", "member,household\n10,1\n20,1\n");
        CHECK_THROWS_AS(load_observed(c), DataError);
    }
    SUBCASE("configuration errors") {
        auto c = basic_config(dir, attrs, {{"a", "u,v\n"}});
        c.excluded = {"money"};
        CHECK_THROWS_AS(load_observed(c), ConfigError);
        const auto path = dir.put("cfg.json", R"({"relations": [], "attributes": "x.csv", "attribute_rule": "odd"})");
        CHECK_THROWS_AS(read_ingest_config(path), ConfigError);
        CHECK_THROWS_AS(read_ingest_config(dir.put("broken.json", "{")), ParseError);
        CHECK_THROWS_AS(read_ingest_config(dir.path / "absent.json"), IoError);
    }
}

TEST_CASE("network round trips") {
    TempDir dir;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto with = random_network(seed, true);
        const auto without = random_network(seed, false);
        for (auto fmt : {NetworkFormat::Json, NetworkFormat::GraphML}) {
            const auto path = dir.path / (fmt == NetworkFormat::Json ? "n.json" : "n.graphml");
            save_network(with, path, fmt);
            REQUIRE(load_network(path) == with);
            save_network(without, path, fmt);
            REQUIRE(load_network(path) == without);
        }
        save_network(with, dir.path / "n.csv", NetworkFormat::Csv);
        const auto csv = load_network(dir.path / "n.csv");
        REQUIRE(csv.graph == with.graph);
        REQUIRE(csv.types == with.types);
        REQUIRE(fs::exists(dir.path / "n.types.csv"));
    }
}

TEST_CASE("json network validation") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_network_json(in);
    };
    const std::string nodes = R"("nodes": [{"id": 0, "type": 0}, {"id": 1, "type": 1}, {"id": 2, "type": 0}])";
    CHECK(parse("{" + nodes + R"(, "edges": [[0, 1]]})").graph.edge_count() == 1);
    CHECK_THROWS_AS(parse("{" + nodes + R"(, "edges": [[0, 1], [1, 0]]})"), ParseError);
    CHECK_THROWS_AS(parse("{" + nodes + R"(, "edges": [[2, 2]]})"), ParseError);
    CHECK_THROWS_AS(parse("{" + nodes + R"(, "edges": [[0, 5]]})"), ParseError);
    CHECK_THROWS_AS(parse(R"({"nodes": [{"id": 0, "type": 2}], "edges": []})"), ParseError);
    CHECK_THROWS_AS(parse(R"({"nodes": [{"id": 1, "type": 0}], "edges": []})"), ParseError);
    CHECK_THROWS_AS(parse(R"({"nodes": [{"id": 0, "type": 0, "strategy": ["Hm", "Lc"]},
                                        {"id": 1, "type": 0}], "edges": []})"),
                    ParseError);
    CHECK_THROWS_AS(parse("{\"nodes\": ["), ParseError);
}

TEST_CASE("graphml export of a triangle") {
    AttributedNetwork net;
    net.graph = testing::graph_of(3, {{0, 1}, {1, 2}, {0, 2}});
    net.types = {Z, Z, Z};
    std::ostringstream out;
    write_graphml(net, out);
    const std::string text = out.str();
    CHECK(text.find("attr.name=\"type\"") != std::string::npos);
    std::istringstream in(text);
    const auto back = read_graphml(in);
    CHECK(back.size() == 3);
    CHECK(back.graph.edge_count() == 3);
    CHECK(back.types == net.types);

    std::istringstream broken("<graphml><graph><node id=\"a\"></graph>");
    CHECK_THROWS_AS(read_graphml(broken), ParseError);
}

TEST_CASE("csv network reader accepts both attribute layouts") {
    std::istringstream edges("u,v\n0,1\n");
    std::istringstream types("id,rooms,beds\n0,9,8\n1,1,1\n");
    const auto net = read_network_csv(edges, types);
    CHECK(net.types == std::vector{O, Z});
    std::istringstream edges2("u,v\n0,1\n0,1\n");
    std::istringstream types2("id,type\n0,0\n1,1\n");
    CHECK_THROWS_AS(read_network_csv(edges2, types2), ParseError);
}

TEST_CASE("trace csv round trip") {
    std::vector<MetricsRecord> trace(3);
    for (std::size_t i = 0; i < 3; ++i) {
        trace[i] = {i, 10 * i, 0.1 * static_cast<double>(i) - 0.15, i * i, 1.0 / 3.0, 5 - i, 7 * i};
    }
    std::ostringstream out;
    write_trace_csv(trace, {{"tool", std::string(kToolVersion)}, {"seed", "7"}}, out);
    const std::string text = out.str();
    CHECK(text.rfind("# tool: commform", 0) == 0);
    CHECK(text.find(std::string(kTraceHeader)) != std::string::npos);
    std::istringstream in(text);
    CHECK(read_trace_csv(in) == trace);
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.0, 0.1, 1.0 / 3.0, -2.5e-17, 123456789.0, 0.1875}) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("format selection") {
    CHECK(parse_format("graphml") == NetworkFormat::GraphML);
    CHECK_THROWS_AS(parse_format("gml"), ConfigError);
    CHECK(format_from_path("a/b.json") == NetworkFormat::Json);
    CHECK(format_from_path("a/b.xml") == NetworkFormat::GraphML);
    CHECK_THROWS_AS(format_from_path("a/b.txt"), ConfigError);
    CHECK(csv_types_path("dir/net.csv") == fs::path("dir/net.types.csv"));
    CHECK_THROWS_AS(read_file("/nonexistent/commform/file"), IoError);
}

TEST_CASE("result serialization") {
    LossReport r{0.25, 0.5, 0.375, 0.75, 0.25};
    const auto j = to_json(r);
    CHECK(j.at("distributional") == 0.25);
    CHECK(j.at("global") == 0.5);
    CHECK(j.at("total") == 0.375);
    CHECK(j.contains("smape_triangles"));

    FitResult fit;
    fit.best_kappa = 10;
    fit.fine = {{10, 0.0, 0.5, 1, 0.2, {0.1, 0.3}}, {10, 0.5, 0.5, 2, 0.4, {0.4, 0.4}}};
    fit.coarse = {{10, 0.0, 0.5, 1, 0.2, {0.1, 0.3}}, {5, 0.0, 0.0, 3, 0.9, {0.9, 0.9}}};
    std::ostringstream out;
    write_grid_csv(fit, {}, out);
    std::istringstream lines(out.str());
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] != '#') {
            rows.push_back(line);
        }
    }
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == "kappa,alpha,beta,run,loss,mean_loss");
    CHECK(rows[1].rfind("5,0,0,0,0.9,0.9", 0) == 0);
    const auto fj = to_json(fit);
    CHECK(fj.at("best_kappa") == 10);
}
