#include "veil/layout/layout_json.hpp"

#include <unordered_map>

#include <json.hpp>

#include "veil/errors.hpp"

namespace veil::layout {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json point_json(const Point& p) { return ordered_json::array({p.x, p.y}); }

double number(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw ParseError(where + ": '" + key + "' must be a number");
    }
    return it->get<double>();
}

std::optional<int> optional_int(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) throw ParseError(where + ": '" + key + "' must be an integer");
    return it->get<int>();
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ParseError(where + ": '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

Point parse_point(const json& value, const std::string& where) {
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
        throw ParseError(where + ": points must be [x, y] pairs");
    }
    return {value[0].get<double>(), value[1].get<double>()};
}

cfg::EdgeKind parse_kind(const std::string& text, const std::string& where) {
    if (text == "tree") return cfg::EdgeKind::Tree;
    if (text == "back") return cfg::EdgeKind::Back;
    if (text == "forward") return cfg::EdgeKind::Forward;
    if (text == "cross") return cfg::EdgeKind::Cross;
    throw ParseError(where + ": unknown edge kind '" + text + "'");
}

} // namespace

std::string to_layout_json(const Layout& layout) {
    ordered_json doc;
    doc["config"] = {{"dx", layout.config.dx},
                     {"dy", layout.config.dy},
                     {"mode", to_string(layout.config.mode)}};
    doc["bbox"] = ordered_json::array(
        {layout.bbox.min_x, layout.bbox.min_y, layout.bbox.max_x, layout.bbox.max_y});
    auto& nodes = doc["nodes"] = ordered_json::array();
    for (const auto& n : layout.nodes) {
        ordered_json j;
        j["id"] = n.id;
        if (n.label) j["label"] = *n.label;
        j["x"] = n.center.x;
        j["y"] = n.center.y;
        j["w"] = n.size.width;
        j["h"] = n.size.height;
        if (n.rank) j["rank"] = *n.rank;
        if (n.ord) j["ord"] = *n.ord;
        if (n.is_virtual) j["virtual"] = true;
        nodes.push_back(std::move(j));
    }
    auto& edges = doc["edges"] = ordered_json::array();
    for (const auto& e : layout.edges) {
        ordered_json j;
        j["src"] = e.src;
        j["dst"] = e.dst;
        j["kind"] = cfg::to_string(e.kind);
        auto& pts = j["points"] = ordered_json::array();
        for (const auto& p : e.points) pts.push_back(point_json(p));
        edges.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

Layout parse_layout_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("layout JSON must be an object");

    Layout out;
    if (auto it = doc.find("config"); it != doc.end()) {
        if (!it->is_object()) throw ParseError("'config' must be an object");
        out.config.dx = number(*it, "dx", "config");
        out.config.dy = number(*it, "dy", "config");
        if (!(out.config.dx > 0.0) || !(out.config.dy > 0.0)) {
            throw ParseError("config: dx and dy must be positive");
        }
        const auto mode_text = string_field(*it, "mode", "config");
        auto mode = parse_mode(mode_text);
        if (!mode) throw ParseError("config: unknown mode '" + mode_text + "'");
        out.config.mode = *mode;
    } else {
        throw ParseError("layout JSON requires 'config'");
    }

    auto nodes = doc.find("nodes");
    if (nodes == doc.end() || !nodes->is_array()) {
        throw ParseError("layout JSON requires a 'nodes' array");
    }
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < nodes->size(); ++i) {
        const auto& n = (*nodes)[i];
        const std::string where = "node " + std::to_string(i);
        if (!n.is_object()) throw ParseError(where + " must be an object");
        LayoutNode ln;
        ln.id = string_field(n, "id", where);
        if (!seen.emplace(ln.id, i).second) throw ParseError("duplicate node id '" + ln.id + "'");
        if (auto it = n.find("label"); it != n.end()) {
            if (!it->is_string()) throw ParseError(where + ": 'label' must be a string");
            ln.label = it->get<std::string>();
        }
        ln.center = {number(n, "x", where), number(n, "y", where)};
        ln.size = {number(n, "w", where), number(n, "h", where)};
        if (ln.size.width < 0.0 || ln.size.height < 0.0) {
            throw ParseError(where + ": negative size");
        }
        ln.rank = optional_int(n, "rank", where);
        ln.ord = optional_int(n, "ord", where);
        if (auto it = n.find("virtual"); it != n.end()) {
            if (!it->is_boolean()) throw ParseError(where + ": 'virtual' must be a boolean");
            ln.is_virtual = it->get<bool>();
        }
        out.nodes.push_back(std::move(ln));
    }

    auto edges = doc.find("edges");
    if (edges == doc.end() || !edges->is_array()) {
        throw ParseError("layout JSON requires an 'edges' array");
    }
    for (std::size_t i = 0; i < edges->size(); ++i) {
        const auto& e = (*edges)[i];
        const std::string where = "edge " + std::to_string(i);
        if (!e.is_object()) throw ParseError(where + " must be an object");
        LayoutEdge le;
        le.src = string_field(e, "src", where);
        le.dst = string_field(e, "dst", where);
        if (!seen.count(le.src)) throw ParseError(where + ": unknown node '" + le.src + "'");
        if (!seen.count(le.dst)) throw ParseError(where + ": unknown node '" + le.dst + "'");
        le.kind = parse_kind(string_field(e, "kind", where), where);
        auto pts = e.find("points");
        if (pts == e.end() || !pts->is_array() || pts->size() < 2) {
            throw ParseError(where + ": 'points' needs at least two points");
        }
        for (const auto& p : *pts) le.points.push_back(parse_point(p, where));
        out.edges.push_back(std::move(le));
    }

    if (auto it = doc.find("bbox"); it != doc.end()) {
        if (!it->is_array() || it->size() != 4) throw ParseError("'bbox' must be [x0, y0, x1, y1]");
        for (const auto& v : *it) {
            if (!v.is_number()) throw ParseError("'bbox' entries must be numbers");
        }
        out.bbox = {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(),
                    (*it)[3].get<double>()};
    } else {
        out.bbox = compute_bbox(out.nodes, out.edges);
    }
    return out;
}

} // namespace veil::layout
