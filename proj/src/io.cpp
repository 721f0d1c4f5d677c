#include "commform/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <boost/tokenizer.hpp>

#include "commform/errors.hpp"

namespace commform {

namespace fs = std::filesystem;
using nlohmann::json;

AttributeType derive_wealth_attribute(long long rooms, long long beds) {
    if (rooms < 0 || beds < 0) {
        throw DataError("rooms and beds must be non-negative");
    }
    // rooms / sqrt(beds + 1) <= 2  <=>  rooms^2 <= 4 (beds + 1), exact in integers.
    const auto r = static_cast<unsigned long long>(rooms);
    const auto b = static_cast<unsigned long long>(beds);
    return r * r <= 4 * (b + 1) ? AttributeType::Zero : AttributeType::One;
}

// ---------------------------------------------------------------------------
// Files and CSV

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << content;
    if (!out.flush()) {
        throw IoError("failed writing " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return in;
}

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> header;
    std::size_t header_line = 0;
    std::vector<CsvRow> rows;

    // Column index of `name`, or npos.
    std::size_t column(std::string_view name) const {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? std::string::npos
                                  : static_cast<std::size_t>(it - header.begin());
    }
};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Blank lines and '#' comments are skipped. Fields may be double-quoted.
CsvTable read_csv(std::istream& in, bool has_header, std::string_view what) {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    const boost::escaped_list_separator<char> sep('\\', ',', '"');
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        std::vector<std::string> fields;
        try {
            boost::tokenizer<boost::escaped_list_separator<char>> tok(t, sep);
            for (const auto& f : tok) {
                fields.push_back(trim(f));
            }
        } catch (const boost::escaped_list_error& e) {
            throw ParseError(std::string(what) + ": " + e.what(), lineno);
        }
        if (has_header && table.header_line == 0) {
            table.header = std::move(fields);
            table.header_line = lineno;
            continue;
        }
        table.rows.push_back({lineno, std::move(fields)});
    }
    if (has_header && table.header_line == 0) {
        throw ParseError(std::string(what) + ": missing header");
    }
    return table;
}

long long parse_int(const std::string& s, std::size_t line, std::string_view what) {
    long long v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) {
        throw ParseError(std::string(what) + ": expected an integer, got '" + s + "'", line);
    }
    return v;
}

const std::string& field(const CsvRow& row, std::size_t col, std::string_view what) {
    if (col >= row.fields.size()) {
        throw ParseError(std::string(what) + ": too few columns", row.line);
    }
    return row.fields[col];
}

void expect_header(const CsvTable& t, std::initializer_list<std::string_view> names,
                   std::string_view what) {
    if (t.header.size() != names.size() ||
        !std::equal(t.header.begin(), t.header.end(), names.begin())) {
        std::string want;
        for (auto n : names) {
            want += (want.empty() ? "" : ",") + std::string(n);
        }
        throw ParseError(std::string(what) + ": expected header '" + want + "'", t.header_line);
    }
}

// Reads `id,type` or `id,rooms,beds` (extra columns ignored) into key -> type.
std::map<long long, AttributeType> read_attribute_table(std::istream& in, AttributeRule rule,
                                                        const std::string& type_column,
                                                        std::string_view what) {
    const CsvTable t = read_csv(in, true, what);
    const std::size_t id_col = t.column("id");
    if (id_col == std::string::npos) {
        throw ParseError(std::string(what) + ": header has no 'id' column", t.header_line);
    }
    const std::size_t type_col = t.column(type_column);
    const std::size_t rooms_col = t.column("rooms");
    const std::size_t beds_col = t.column("beds");
    if (rule == AttributeRule::ExplicitColumn && type_col == std::string::npos) {
        throw ParseError(std::string(what) + ": header has no '" + type_column + "' column",
                         t.header_line);
    }
    if (rule == AttributeRule::RoomsOverSqrtBeds &&
        (rooms_col == std::string::npos || beds_col == std::string::npos)) {
        throw ParseError(std::string(what) + ": header needs 'rooms' and 'beds' columns",
                         t.header_line);
    }
    std::map<long long, AttributeType> out;
    for (const auto& row : t.rows) {
        const long long id = parse_int(field(row, id_col, what), row.line, what);
        AttributeType type;
        if (rule == AttributeRule::ExplicitColumn) {
            const long long v = parse_int(field(row, type_col, what), row.line, what);
            if (v != 0 && v != 1) {
                throw ParseError(std::string(what) + ": type must be 0 or 1", row.line);
            }
            type = v == 0 ? AttributeType::Zero : AttributeType::One;
        } else {
            const long long rooms = parse_int(field(row, rooms_col, what), row.line, what);
            const long long beds = parse_int(field(row, beds_col, what), row.line, what);
            try {
                type = derive_wealth_attribute(rooms, beds);
            } catch (const DataError& e) {
                throw DataError(std::string(what) + ": " + e.what() + " (line " +
                                std::to_string(row.line) + ")");
            }
        }
        if (!out.emplace(id, type).second) {
            throw ParseError(std::string(what) + ": duplicate id " + std::to_string(id), row.line);
        }
    }
    return out;
}

std::vector<std::pair<long long, long long>> read_relation(const RelationFile& rel) {
    auto in = open_in(rel.path);
    const std::string what = rel.path.string();
    std::vector<std::pair<long long, long long>> pairs;
    if (rel.format == "edges") {
        const CsvTable t = read_csv(in, true, what);
        expect_header(t, {"u", "v"}, what);
        for (const auto& row : t.rows) {
            if (row.fields.size() != 2) {
                throw ParseError(what + ": expected 2 columns", row.line);
            }
            pairs.emplace_back(parse_int(row.fields[0], row.line, what),
                               parse_int(row.fields[1], row.line, what));
        }
    } else if (rel.format == "matrix") {
        const CsvTable t = read_csv(in, false, what);
        const std::size_t n = t.rows.size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = t.rows[i];
            if (row.fields.size() != n) {
                throw ParseError(what + ": adjacency matrix is not square", row.line);
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (parse_int(row.fields[j], row.line, what) != 0) {
                    pairs.emplace_back(static_cast<long long>(i), static_cast<long long>(j));
                }
            }
        }
    } else {
        throw ConfigError("relation " + rel.name + ": unknown format '" + rel.format + "'");
    }
    return pairs;
}

std::string list_ids(const std::set<long long>& ids) {
    std::string s;
    std::size_t shown = 0;
    for (long long id : ids) {
        if (shown == 20) {
            s += ", ... (" + std::to_string(ids.size()) + " total)";
            break;
        }
        s += (shown ? ", " : "") + std::to_string(id);
        ++shown;
    }
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// Ingestion

void IngestConfig::validate() const {
    std::set<std::string> names;
    for (const auto& r : relations) {
        if (!names.insert(r.name).second) {
            throw ConfigError("relation '" + r.name + "' listed twice");
        }
        if (r.format != "edges" && r.format != "matrix") {
            throw ConfigError("relation '" + r.name + "': unknown format '" + r.format + "'");
        }
    }
    for (const auto& e : excluded) {
        if (!names.count(e)) {
            throw ConfigError("excluded relation '" + e + "' is not among the relation files");
        }
    }
    if (attributes.empty()) {
        throw ConfigError("ingest config needs an attribute table");
    }
    if (rule == AttributeRule::ExplicitColumn && type_column.empty()) {
        throw ConfigError("explicit attribute rule needs a column name");
    }
}

IngestConfig ingest_config_from_json(const json& j, const fs::path& base) {
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base / path;
    };
    IngestConfig c;
    try {
        c.label = j.value("label", std::string{});
        for (const auto& r : j.at("relations")) {
            RelationFile rf;
            rf.name = r.at("name").get<std::string>();
            rf.path = resolve(r.at("path").get<std::string>());
            rf.format = r.value("format", std::string("edges"));
            c.relations.push_back(std::move(rf));
        }
        c.excluded = j.value("exclude", std::vector<std::string>{});
        c.attributes = resolve(j.at("attributes").get<std::string>());
        const std::string rule = j.value("attribute_rule", std::string("rooms_over_sqrt_beds"));
        if (rule == "rooms_over_sqrt_beds") {
            c.rule = AttributeRule::RoomsOverSqrtBeds;
        } else if (rule == "explicit") {
            c.rule = AttributeRule::ExplicitColumn;
        } else {
            throw ConfigError("unknown attribute_rule '" + rule + "'");
        }
        c.type_column = j.value("type_column", std::string("type"));
        if (j.contains("household_map")) {
            c.household_map = resolve(j.at("household_map").get<std::string>());
        }
        c.drop_unattributed = j.value("drop_unattributed", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("ingest config: ") + e.what());
    }
    c.validate();
    return c;
}

IngestConfig read_ingest_config(const fs::path& path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    IngestConfig c = ingest_config_from_json(j, path.parent_path());
    if (c.label.empty()) {
        c.label = path.stem().string();
    }
    return c;
}

ObservedNetwork load_observed(const IngestConfig& config) {
    config.validate();
    std::map<long long, AttributeType> attrs;
    {
        auto in = open_in(config.attributes);
        attrs = read_attribute_table(in, config.rule, config.type_column,
                                     config.attributes.string());
    }
    std::unordered_map<long long, AgentId> index;
    ObservedNetwork net;
    net.types.reserve(attrs.size());
    for (const auto& [key, type] : attrs) {
        index.emplace(key, static_cast<AgentId>(net.types.size()));
        net.types.push_back(type);
    }

    std::optional<std::unordered_map<long long, long long>> household;
    if (config.household_map) {
        auto in = open_in(*config.household_map);
        const std::string what = config.household_map->string();
        const CsvTable t = read_csv(in, true, what);
        expect_header(t, {"member", "household"}, what);
        household.emplace();
        for (const auto& row : t.rows) {
            const long long m = parse_int(field(row, 0, what), row.line, what);
            const long long h = parse_int(field(row, 1, what), row.line, what);
            if (!household->emplace(m, h).second) {
                throw ParseError(what + ": member " + std::to_string(m) + " mapped twice",
                                 row.line);
            }
        }
    }

    const std::set<std::string> excluded(config.excluded.begin(), config.excluded.end());
    std::set<Edge> edges;
    std::set<long long> unmapped_members;
    std::set<long long> missing;
    for (const auto& rel : config.relations) {
        if (excluded.count(rel.name)) {
            continue;
        }
        for (auto [a, b] : read_relation(rel)) {
            if (household) {
                auto ia = household->find(a);
                auto ib = household->find(b);
                if (ia == household->end()) unmapped_members.insert(a);
                if (ib == household->end()) unmapped_members.insert(b);
                if (ia == household->end() || ib == household->end()) {
                    continue;
                }
                a = ia->second;
                b = ib->second;
            }
            auto ia = index.find(a);
            auto ib = index.find(b);
            if (ia == index.end()) missing.insert(a);
            if (ib == index.end()) missing.insert(b);
            if (ia == index.end() || ib == index.end() || a == b) {
                continue;
            }
            edges.insert(make_edge(ia->second, ib->second));
        }
    }
    if (!unmapped_members.empty()) {
        throw DataError("members without a household: " + list_ids(unmapped_members));
    }
    if (!missing.empty() && !config.drop_unattributed) {
        throw DataError("households without attributes: " + list_ids(missing));
    }
    const std::vector<Edge> edge_list(edges.begin(), edges.end());
    net.graph = NetworkState::from_edges(net.types.size(), edge_list);
    net.provenance = config.label;
    return net;
}

// ---------------------------------------------------------------------------
// Network formats

NetworkFormat parse_format(std::string_view s) {
    if (s == "json") return NetworkFormat::Json;
    if (s == "csv") return NetworkFormat::Csv;
    if (s == "graphml") return NetworkFormat::GraphML;
    throw ConfigError("unknown network format '" + std::string(s) + "'");
}

NetworkFormat format_from_path(const fs::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".json") return NetworkFormat::Json;
    if (ext == ".csv") return NetworkFormat::Csv;
    if (ext == ".graphml" || ext == ".xml") return NetworkFormat::GraphML;
    throw ConfigError("cannot infer network format from '" + path.string() + "'");
}

fs::path csv_types_path(const fs::path& edges_path) {
    fs::path p = edges_path;
    p.replace_extension();
    p += ".types.csv";
    return p;
}

namespace {

// Rejects self-loops, duplicates in either orientation and out-of-range ids.
class EdgeCollector {
  public:
    EdgeCollector(std::size_t n, std::string what) : n_(n), what_(std::move(what)) {}

    void add(long long u, long long v, std::size_t line) {
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n_ ||
            static_cast<std::size_t>(v) >= n_) {
            throw ParseError(what_ + ": edge endpoint is not a node", line);
        }
        if (u == v) {
            throw ParseError(what_ + ": self-loop", line);
        }
        const Edge e = make_edge(static_cast<AgentId>(u), static_cast<AgentId>(v));
        if (!seen_.insert(e).second) {
            throw ParseError(what_ + ": duplicate edge " + std::to_string(e.u) + "-" +
                                 std::to_string(e.v),
                             line);
        }
        edges_.push_back(e);
    }

    NetworkState build() const { return NetworkState::from_edges(n_, edges_); }

  private:
    std::size_t n_;
    std::string what_;
    std::set<Edge> seen_;
    std::vector<Edge> edges_;
};

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

} // namespace

void write_network_json(const AttributedNetwork& net, std::ostream& out) {
    net.validate();
    out << "{\n";
    if (!net.provenance.empty()) {
        out << "  \"provenance\": " << json(net.provenance).dump() << ",\n";
    }
    out << "  \"nodes\": [";
    for (AgentId v = 0; v < net.size(); ++v) {
        json node = {{"id", v}, {"type", to_int(net.types[v])}};
        if (net.strategies) {
            const Strategy& s = (*net.strategies)[v];
            node["strategy"] = {std::string(to_string(s.attribute)),
                                std::string(to_string(s.structure))};
        }
        out << (v ? ",\n    " : "\n    ") << node.dump();
    }
    out << (net.size() ? "\n  ],\n" : "],\n");
    out << "  \"edges\": [";
    bool first = true;
    for (const Edge& e : net.graph.edges()) {
        out << (first ? "" : ", ") << '[' << e.u << ',' << e.v << ']';
        first = false;
    }
    out << "]\n}\n";
}

AttributedNetwork read_network_json(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("network json: ") + e.what(), line_of_offset(text, e.byte));
    }
    AttributedNetwork net;
    try {
        const auto& nodes = j.at("nodes");
        if (!nodes.is_array()) {
            throw ParseError("network json: 'nodes' must be an array");
        }
        const std::size_t n = nodes.size();
        net.types.assign(n, AttributeType::Zero);
        std::vector<char> seen(n, 0);
        std::vector<Strategy> strategies(n);
        std::size_t with_strategy = 0;
        for (const auto& node : nodes) {
            const auto id = node.at("id").get<long long>();
            if (id < 0 || static_cast<std::size_t>(id) >= n || seen[static_cast<std::size_t>(id)]) {
                throw ParseError("network json: node ids must be 0..n-1, each once (bad id " +
                                 std::to_string(id) + ")");
            }
            const auto v = static_cast<std::size_t>(id);
            seen[v] = 1;
            const auto type = node.at("type").get<long long>();
            if (type != 0 && type != 1) {
                throw ParseError("network json: node " + std::to_string(id) + " type must be 0 or 1");
            }
            net.types[v] = type == 0 ? AttributeType::Zero : AttributeType::One;
            if (node.contains("strategy")) {
                const auto& s = node.at("strategy");
                if (!s.is_array() || s.size() != 2) {
                    throw ParseError("network json: strategy must be [attribute, structure]");
                }
                try {
                    strategies[v].attribute = parse_attribute_strategy(s[0].get<std::string>());
                    strategies[v].structure = parse_structure_strategy(s[1].get<std::string>());
                } catch (const ConfigError& e) {
                    throw ParseError(std::string("network json: ") + e.what());
                }
                ++with_strategy;
            }
        }
        if (with_strategy != 0 && with_strategy != n) {
            throw ParseError("network json: strategies must be given for all nodes or none");
        }
        if (with_strategy == n && n > 0) {
            net.strategies = std::move(strategies);
        }
        EdgeCollector edges(n, "network json");
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw ParseError("network json: each edge must be [u, v]");
            }
            edges.add(e[0].get<long long>(), e[1].get<long long>(), 0);
        }
        net.graph = edges.build();
        net.provenance = j.value("provenance", std::string{});
    } catch (const json::exception& e) {
        throw ParseError(std::string("network json: ") + e.what());
    }
    return net;
}

void write_graphml(const AttributedNetwork& net, std::ostream& out) {
    net.validate();
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
           "  <key id=\"type\" for=\"node\" attr.name=\"type\" attr.type=\"int\"/>\n";
    if (net.strategies) {
        out << "  <key id=\"strat_attr\" for=\"node\" attr.name=\"strat_attr\" "
               "attr.type=\"string\"/>\n"
               "  <key id=\"strat_struct\" for=\"node\" attr.name=\"strat_struct\" "
               "attr.type=\"string\"/>\n";
    }
    out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (AgentId v = 0; v < net.size(); ++v) {
        out << "    <node id=\"n" << v << "\"><data key=\"type\">" << to_int(net.types[v])
            << "</data>";
        if (net.strategies) {
            const Strategy& s = (*net.strategies)[v];
            out << "<data key=\"strat_attr\">" << to_string(s.attribute)
                << "</data><data key=\"strat_struct\">" << to_string(s.structure) << "</data>";
        }
        out << "</node>\n";
    }
    for (const Edge& e : net.graph.edges()) {
        out << "    <edge source=\"n" << e.u << "\" target=\"n" << e.v << "\"/>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

AttributedNetwork read_graphml(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("graphml: " + e.message(), e.line());
    }
    const auto root = tree.get_child_optional("graphml");
    if (!root) {
        throw ParseError("graphml: missing <graphml> root");
    }
    // key id -> attribute name
    std::map<std::string, std::string> keys;
    const pt::ptree* graph = nullptr;
    for (const auto& [tag, child] : *root) {
        if (tag == "key") {
            const std::string dom = child.get("<xmlattr>.for", "all");
            if (dom == "node" || dom == "all") {
                const std::string id = child.get("<xmlattr>.id", "");
                keys[id] = child.get("<xmlattr>.attr.name", id);
            }
        } else if (tag == "graph" && !graph) {
            graph = &child;
        }
    }
    if (!graph) {
        throw ParseError("graphml: missing <graph>");
    }

    std::map<std::string, AgentId> ids;
    std::vector<std::map<std::string, std::string>> data;
    for (const auto& [tag, child] : *graph) {
        if (tag != "node") {
            continue;
        }
        const std::string id = child.get("<xmlattr>.id", "");
        if (id.empty() || !ids.emplace(id, static_cast<AgentId>(data.size())).second) {
            throw ParseError("graphml: missing or duplicate node id '" + id + "'");
        }
        auto& values = data.emplace_back();
        for (const auto& [dtag, d] : child) {
            if (dtag == "data") {
                const std::string key = d.get("<xmlattr>.key", "");
                auto it = keys.find(key);
                values[it == keys.end() ? key : it->second] = d.data();
            }
        }
    }

    AttributedNetwork net;
    const std::size_t n = data.size();
    net.types.resize(n);
    std::vector<Strategy> strategies(n);
    std::size_t with_strategy = 0;
    for (std::size_t v = 0; v < n; ++v) {
        auto it = data[v].find("type");
        if (it == data[v].end()) {
            throw ParseError("graphml: node " + std::to_string(v) + " has no type");
        }
        const long long t = parse_int(trim(it->second), 0, "graphml");
        if (t != 0 && t != 1) {
            throw ParseError("graphml: type must be 0 or 1");
        }
        net.types[v] = t == 0 ? AttributeType::Zero : AttributeType::One;
        auto sa = data[v].find("strat_attr");
        auto ss = data[v].find("strat_struct");
        if (sa != data[v].end() && ss != data[v].end()) {
            try {
                strategies[v] = {parse_attribute_strategy(trim(sa->second)),
                                 parse_structure_strategy(trim(ss->second))};
            } catch (const ConfigError& e) {
                throw ParseError(std::string("graphml: ") + e.what());
            }
            ++with_strategy;
        }
    }
    if (with_strategy == n && n > 0) {
        net.strategies = std::move(strategies);
    }
    EdgeCollector edges(n, "graphml");
    for (const auto& [tag, child] : *graph) {
        if (tag != "edge") {
            continue;
        }
        auto s = ids.find(child.get("<xmlattr>.source", ""));
        auto t = ids.find(child.get("<xmlattr>.target", ""));
        if (s == ids.end() || t == ids.end()) {
            throw ParseError("graphml: edge references an unknown node");
        }
        edges.add(s->second, t->second, 0);
    }
    net.graph = edges.build();
    return net;
}

void write_edges_csv(const NetworkState& g, std::ostream& out) {
    out << "u,v\n";
    for (const Edge& e : g.edges()) {
        out << e.u << ',' << e.v << '\n';
    }
}

void write_types_csv(std::span<const AttributeType> types, std::ostream& out) {
    out << "id,type\n";
    for (std::size_t v = 0; v < types.size(); ++v) {
        out << v << ',' << to_int(types[v]) << '\n';
    }
}

AttributedNetwork read_network_csv(std::istream& edges_in, std::istream& types_in) {
    std::ostringstream ss;
    ss << types_in.rdbuf();
    const std::string text = ss.str();
    // An explicit type column wins over rooms/beds.
    std::istringstream probe(text);
    const AttributeRule rule = read_csv(probe, true, "attribute csv").column("type") != std::string::npos
                                   ? AttributeRule::ExplicitColumn
                                   : AttributeRule::RoomsOverSqrtBeds;
    std::istringstream types_copy(text);
    const auto attrs = read_attribute_table(types_copy, rule, "type", "attribute csv");

    AttributedNetwork net;
    const std::size_t n = attrs.size();
    std::size_t expect = 0;
    for (const auto& [id, type] : attrs) {
        if (id != static_cast<long long>(expect)) {
            throw ParseError("attribute csv: node ids must be 0..n-1");
        }
        net.types.push_back(type);
        ++expect;
    }
    const CsvTable et = read_csv(edges_in, true, "edge csv");
    expect_header(et, {"u", "v"}, "edge csv");
    EdgeCollector edges(n, "edge csv");
    for (const auto& row : et.rows) {
        if (row.fields.size() != 2) {
            throw ParseError("edge csv: expected 2 columns", row.line);
        }
        edges.add(parse_int(row.fields[0], row.line, "edge csv"),
                  parse_int(row.fields[1], row.line, "edge csv"), row.line);
    }
    net.graph = edges.build();
    return net;
}

void save_network(const AttributedNetwork& net, const fs::path& path, NetworkFormat format) {
    std::ostringstream out;
    switch (format) {
    case NetworkFormat::Json:
        write_network_json(net, out);
        break;
    case NetworkFormat::GraphML:
        write_graphml(net, out);
        break;
    case NetworkFormat::Csv: {
        net.validate();
        write_edges_csv(net.graph, out);
        std::ostringstream types;
        write_types_csv(net.types, types);
        write_file(csv_types_path(path), types.str());
        break;
    }
    }
    write_file(path, out.str());
}

AttributedNetwork load_network(const fs::path& path, NetworkFormat format) {
    auto in = open_in(path);
    AttributedNetwork net;
    try {
        switch (format) {
        case NetworkFormat::Json:
            net = read_network_json(in);
            break;
        case NetworkFormat::GraphML:
            net = read_graphml(in);
            break;
        case NetworkFormat::Csv: {
            auto types = open_in(csv_types_path(path));
            net = read_network_csv(in, types);
            break;
        }
        }
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (net.provenance.empty()) {
        net.provenance = path.filename().string();
    }
    return net;
}

// ---------------------------------------------------------------------------
// Trace, results

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

void write_trace_csv(std::span<const MetricsRecord> trace, const Metadata& meta, std::ostream& out) {
    for (const auto& [k, v] : meta) {
        out << "# " << k << ": " << v << '\n';
    }
    out << kTraceHeader << '\n';
    for (const auto& r : trace) {
        out << r.iteration << ',' << r.edge_count << ',' << r.triangle_count << ','
            << format_double(r.global_assortativity) << ',' << r.stable_triads << ','
            << format_double(r.avg_utility) << ',' << r.community_count << '\n';
    }
}

std::vector<MetricsRecord> read_trace_csv(std::istream& in) {
    const CsvTable t = read_csv(in, true, "trace csv");
    expect_header(t,
                  {"iter", "edges", "triangles", "assortativity", "stable_triads", "avg_utility",
                   "communities"},
                  "trace csv");
    auto as_double = [](const std::string& s, std::size_t line) {
        double v = 0.0;
        const char* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || ptr != end) {
            throw ParseError("trace csv: expected a number, got '" + s + "'", line);
        }
        return v;
    };
    std::vector<MetricsRecord> out;
    for (const auto& row : t.rows) {
        if (row.fields.size() != 7) {
            throw ParseError("trace csv: expected 7 columns", row.line);
        }
        auto count = [&](std::size_t i) {
            const long long v = parse_int(row.fields[i], row.line, "trace csv");
            if (v < 0) {
                throw ParseError("trace csv: negative count", row.line);
            }
            return static_cast<std::size_t>(v);
        };
        MetricsRecord r;
        r.iteration = count(0);
        r.edge_count = count(1);
        r.triangle_count = count(2);
        r.global_assortativity = as_double(row.fields[3], row.line);
        r.stable_triads = count(4);
        r.avg_utility = as_double(row.fields[5], row.line);
        r.community_count = count(6);
        out.push_back(r);
    }
    return out;
}

json to_json(const ModelParams& p) {
    return {{"n", p.n},
            {"kappa", p.kappa},
            {"alpha", p.alpha},
            {"beta", p.beta},
            {"omega", {p.omega[0], p.omega[1]}},
            {"exact_type_counts", p.exact_type_counts},
            {"epsilon", p.epsilon},
            {"max_iters", p.max_iters},
            {"seed", p.seed},
            {"ablation", std::string(to_string(p.ablation))}};
}

json to_json(const MetricsRecord& r) {
    return {{"iteration", r.iteration},
            {"edges", r.edge_count},
            {"triangles", r.triangle_count},
            {"assortativity", r.global_assortativity},
            {"stable_triads", r.stable_triads},
            {"avg_utility", r.avg_utility},
            {"communities", r.community_count}};
}

json to_json(const LossReport& r) {
    return {{"distributional", r.distributional},
            {"global", r.global},
            {"total", r.total},
            {"smape_triangles", r.smape_triangles},
            {"smape_assortativity", r.smape_assortativity}};
}

json to_json(const GridSpec& g) {
    return {{"kappa_values", g.kappa_values},
            {"coarse_grid", g.coarse_grid},
            {"alpha_grid", g.alpha_grid},
            {"beta_grid", g.beta_grid},
            {"runs_per_cell", g.runs_per_cell},
            {"campaign_seed", g.campaign_seed},
            {"epsilon", g.epsilon},
            {"max_iters", g.max_iters},
            {"exact_type_counts", g.exact_type_counts}};
}

namespace {

json cells_json(const std::vector<CellResult>& cells) {
    json arr = json::array();
    for (const auto& c : cells) {
        arr.push_back({{"kappa", c.kappa},
                       {"alpha", c.alpha},
                       {"beta", c.beta},
                       {"base_seed", c.base_seed},
                       {"mean_loss", c.mean_loss},
                       {"run_losses", c.run_losses}});
    }
    return arr;
}

} // namespace

json to_json(const FitResult& r) {
    return {{"tool", std::string(kToolVersion)},
            {"provenance", r.provenance},
            {"ablation", std::string(to_string(r.ablation))},
            {"best_kappa", r.best_kappa},
            {"best_alpha", r.best_alpha},
            {"best_beta", r.best_beta},
            {"best_loss", r.best_loss},
            {"omega", {r.omega[0], r.omega[1]}},
            {"grid", to_json(r.grid)},
            {"coarse", cells_json(r.coarse)},
            {"fine", cells_json(r.fine)}};
}

json summary_json(const SimulationResult& result, const ModelParams& params) {
    std::size_t hm = 0, lc = 0, type1 = 0;
    for (const auto& p : result.profiles) {
        hm += p.strategy.attribute == AttributeStrategy::Homophily ? 1 : 0;
        lc += p.strategy.structure == StructureStrategy::SocialCapital ? 1 : 0;
        type1 += p.type == AttributeType::One ? 1 : 0;
    }
    return {{"tool", std::string(kToolVersion)},
            {"params", to_json(params)},
            {"converged", result.converged},
            {"iterations", result.iterations},
            {"population", {{"homophilic", hm}, {"social_capital", lc}, {"type_one", type1}}},
            {"initial_stable_triads", result.triad_history.front()},
            {"final", to_json(result.final_metrics)}};
}

void write_grid_csv(const FitResult& r, const Metadata& meta, std::ostream& out) {
    for (const auto& [k, v] : meta) {
        out << "# " << k << ": " << v << '\n';
    }
    out << "kappa,alpha,beta,run,loss,mean_loss\n";
    std::map<std::tuple<std::size_t, double, double>, const CellResult*> cells;
    for (const auto& c : r.coarse) cells[{c.kappa, c.alpha, c.beta}] = &c;
    for (const auto& c : r.fine) cells[{c.kappa, c.alpha, c.beta}] = &c;
    for (const auto& [key, c] : cells) {
        for (std::size_t i = 0; i < c->run_losses.size(); ++i) {
            out << c->kappa << ',' << format_double(c->alpha) << ',' << format_double(c->beta)
                << ',' << i << ',' << format_double(c->run_losses[i]) << ','
                << format_double(c->mean_loss) << '\n';
        }
    }
}

} // namespace commform
