#include <json.hpp>

#include "veil/cfg/io.hpp"
#include "veil/errors.hpp"

namespace veil::cfg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string node_key(const json& value, const char* where) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    throw ParseError(std::string(where) + " must be a string or integer");
}

std::optional<double> positive_number(const json& obj, const char* key, const std::string& id) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number() || it->get<double>() < 0.0) {
        throw ParseError("node '" + id + "': " + key + " must be a non-negative number");
    }
    return it->get<double>();
}

} // namespace

CfgGraph parse_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("CFG JSON must be an object");
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw ParseError("CFG JSON requires a 'nodes' array");
    }

    CfgGraph g;
    for (const auto& n : doc["nodes"]) {
        if (!n.is_object() || !n.contains("id")) throw ParseError("every node needs an 'id'");
        const std::string id = node_key(n["id"], "node id");
        if (g.find(id)) throw ParseError("duplicate node id '" + id + "'");
        std::optional<std::string> label;
        if (auto it = n.find("label"); it != n.end() && it->is_string()) {
            label = it->get<std::string>();
        }
        auto w = positive_number(n, "width", id);
        auto h = positive_number(n, "height", id);
        std::optional<Size> size;
        if (w || h) {
            if (!w || !h) throw ParseError("node '" + id + "': width and height go together");
            size = Size{*w, *h};
        }
        g.add_node(id, std::move(label), size);
    }

    if (auto it = doc.find("edges"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("'edges' must be an array");
        for (const auto& e : *it) {
            if (!e.is_object() || !e.contains("src") || !e.contains("dst")) {
                throw ParseError("every edge needs 'src' and 'dst'");
            }
            const std::string src = node_key(e["src"], "edge src");
            const std::string dst = node_key(e["dst"], "edge dst");
            auto s = g.find(src);
            if (!s) throw ParseError("edge references unknown node '" + src + "'");
            auto d = g.find(dst);
            if (!d) throw ParseError("edge references unknown node '" + dst + "'");
            g.add_edge(*s, *d);
        }
    }

    if (!doc.contains("entry")) throw ParseError("CFG JSON requires an 'entry'");
    const std::string entry = node_key(doc["entry"], "entry");
    auto e = g.find(entry);
    if (!e) throw ParseError("entry '" + entry + "' is not a node");
    g.set_entry(*e);
    return g;
}

std::string to_json(const CfgGraph& g) {
    ordered_json doc;
    doc["entry"] = g.node(g.entry()).name;
    auto nodes = ordered_json::array();
    for (const auto& n : g.nodes()) {
        if (n.is_virtual) continue;
        ordered_json j;
        j["id"] = n.name;
        if (n.label) j["label"] = *n.label;
        if (n.size) {
            j["width"] = n.size->width;
            j["height"] = n.size->height;
        }
        nodes.push_back(std::move(j));
    }
    doc["nodes"] = std::move(nodes);
    auto edges = ordered_json::array();
    for (const auto& e : g.edges()) {
        if (g.node(e.src).is_virtual || g.node(e.dst).is_virtual) continue;
        ordered_json j;
        j["src"] = g.node(e.src).name;
        j["dst"] = g.node(e.dst).name;
        edges.push_back(std::move(j));
    }
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
}

} // namespace veil::cfg
