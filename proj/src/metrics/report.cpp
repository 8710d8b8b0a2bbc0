#include <algorithm>
#include <functional>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "veil/errors.hpp"
#include "veil/metrics/metrics.hpp"

namespace veil::metrics {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

enum class Better { Higher, Lower };

struct Row {
    const char* name;
    Better better;
    std::function<std::optional<double>(const MetricsReport&)> value;
    bool integral = false;
};

const std::vector<Row>& rows() {
    static const std::vector<Row> table = {
        {"node_orthogonality", Better::Higher, [](const auto& r) { return r.node_orthogonality; }},
        {"edge_orthogonality", Better::Higher, [](const auto& r) { return r.edge_orthogonality; }},
        {"crossings", Better::Lower,
         [](const auto& r) { return static_cast<double>(r.crossings); }, true},
        {"bends", Better::Lower, [](const auto& r) { return static_cast<double>(r.bends); }, true},
        {"mad_log_edge_length", Better::Lower, [](const auto& r) { return r.mad_log_edge_length; }},
        {"edge_length_total", Better::Lower, [](const auto& r) { return r.edge_length_total; }},
        {"edge_length_max", Better::Lower, [](const auto& r) { return r.edge_length_max; }},
        {"edge_length_median", Better::Lower, [](const auto& r) { return r.edge_length_median; }},
        {"area", Better::Lower, [](const auto& r) { return r.area; }},
        {"tension_sum", Better::Lower, [](const auto& r) { return r.tension_sum; }},
        {"tension_median", Better::Lower, [](const auto& r) { return r.tension_median; }},
        {"consistent_flow", Better::Higher, [](const auto& r) { return r.consistent_flow; }},
        {"happens_before", Better::Higher, [](const auto& r) { return r.happens_before; }},
        {"grouping_distance_median", Better::Lower,
         [](const auto& r) { return r.grouping_distance_median; }},
    };
    return table;
}

const char* arrow(Better b) { return b == Better::Higher ? "↑" : "↓"; }

std::string cell(std::optional<double> v, bool integral) {
    if (!v) return "-";
    if (integral) return fmt::format("{}", static_cast<long long>(*v));
    return fmt::format("{:.4f}", *v);
}

std::string delta_cell(std::optional<double> v, std::optional<double> base, bool integral) {
    if (!v || !base) return "-";
    const double d = *v - *base;
    if (integral) return fmt::format("{:+}", static_cast<long long>(d));
    if (std::abs(d) < 5e-5) return "+0.0000";
    return fmt::format("{:+.4f}", d);
}

void put_optional(ordered_json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

double get_number(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_number()) {
        throw ParseError(std::string("metrics JSON: '") + key + "' must be a number");
    }
    return it->get<double>();
}

std::optional<double> get_optional(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) {
        throw ParseError(std::string("metrics JSON: '") + key + "' must be a number");
    }
    return it->get<double>();
}

std::uint64_t get_count(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_number_unsigned()) {
        throw ParseError(std::string("metrics JSON: '") + key + "' must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

} // namespace

std::string to_json(const MetricsReport& r) {
    ordered_json j;
    j["node_orthogonality"] = r.node_orthogonality;
    j["edge_orthogonality"] = r.edge_orthogonality;
    j["crossings"] = r.crossings;
    j["bends"] = r.bends;
    j["mad_log_edge_length"] = r.mad_log_edge_length;
    j["edge_length_total"] = r.edge_length_total;
    j["edge_length_max"] = r.edge_length_max;
    j["edge_length_median"] = r.edge_length_median;
    j["area"] = r.area;
    j["tension_sum"] = r.tension_sum;
    j["tension_median"] = r.tension_median;
    j["consistent_flow"] = r.consistent_flow;
    put_optional(j, "happens_before", r.happens_before);
    put_optional(j, "grouping_distance_median", r.grouping_distance_median);
    put_optional(j, "grouping_distance_back_median", r.grouping_distance_back_median);
    put_optional(j, "grouping_distance_forward_median", r.grouping_distance_forward_median);
    put_optional(j, "layout_time_ms", r.layout_time_ms);
    ordered_json meta;
    meta["mode"] = r.mode;
    meta["nodes"] = r.nodes;
    meta["edges"] = r.edges;
    meta["ranks"] = r.ranks_derived ? "derived" : "native";
    meta["diagnostics"] = r.diagnostics;
    j["metadata"] = std::move(meta);
    return j.dump(2) + "\n";
}

MetricsReport parse_metrics_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("metrics JSON must be an object");
    MetricsReport r;
    r.node_orthogonality = get_number(doc, "node_orthogonality");
    r.edge_orthogonality = get_number(doc, "edge_orthogonality");
    r.crossings = get_count(doc, "crossings");
    r.bends = get_count(doc, "bends");
    r.mad_log_edge_length = get_number(doc, "mad_log_edge_length");
    r.edge_length_total = get_number(doc, "edge_length_total");
    r.edge_length_max = get_number(doc, "edge_length_max");
    r.edge_length_median = get_number(doc, "edge_length_median");
    r.area = get_number(doc, "area");
    r.tension_sum = get_number(doc, "tension_sum");
    r.tension_median = get_number(doc, "tension_median");
    r.consistent_flow = get_number(doc, "consistent_flow");
    r.happens_before = get_optional(doc, "happens_before");
    r.grouping_distance_median = get_optional(doc, "grouping_distance_median");
    r.grouping_distance_back_median = get_optional(doc, "grouping_distance_back_median");
    r.grouping_distance_forward_median = get_optional(doc, "grouping_distance_forward_median");
    r.layout_time_ms = get_optional(doc, "layout_time_ms");
    if (auto it = doc.find("metadata"); it != doc.end() && it->is_object()) {
        const auto& m = *it;
        if (m.contains("mode") && m["mode"].is_string()) r.mode = m["mode"].get<std::string>();
        if (m.contains("nodes") && m["nodes"].is_number_unsigned()) r.nodes = m["nodes"];
        if (m.contains("edges") && m["edges"].is_number_unsigned()) r.edges = m["edges"];
        if (m.contains("ranks") && m["ranks"].is_string()) r.ranks_derived = m["ranks"] == "derived";
        if (m.contains("diagnostics") && m["diagnostics"].is_array()) {
            for (const auto& d : m["diagnostics"]) {
                if (d.is_string()) r.diagnostics.push_back(d.get<std::string>());
            }
        }
    }
    return r;
}

std::string to_table(const MetricsReport& r) {
    std::string out = fmt::format("{:<28}    {:>14}\n", "metric", "value");
    for (const auto& row : rows()) {
        out += fmt::format("{:<28} {}  {:>14}\n", row.name, arrow(row.better),
                           cell(row.value(r), row.integral));
    }
    out += fmt::format("{:<28}    {:>14}\n", "ranks", r.ranks_derived ? "derived" : "native");
    return out;
}

std::string compare_table(const std::vector<std::string>& names,
                          const std::vector<MetricsReport>& reports) {
    constexpr int kWidth = 14;
    auto clip = [](std::string s) {
        if (s.size() > kWidth) s = s.substr(s.size() - kWidth);
        return s;
    };
    std::string out = fmt::format("{:<28}   ", "metric");
    for (std::size_t i = 0; i < names.size(); ++i) {
        out += fmt::format(" {:>{}}", clip(names[i]), kWidth);
        if (i > 0) out += fmt::format(" {:>{}}", clip("d" + std::to_string(i + 1)), kWidth);
    }
    out += "\n";
    for (const auto& row : rows()) {
        out += fmt::format("{:<28} {} ", row.name, arrow(row.better));
        const auto base = reports.empty() ? std::nullopt : row.value(reports.front());
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto v = row.value(reports[i]);
            out += fmt::format(" {:>{}}", cell(v, row.integral), kWidth);
            if (i > 0) out += fmt::format(" {:>{}}", delta_cell(v, base, row.integral), kWidth);
        }
        out += "\n";
    }
    return out;
}

void require_same_nodes(const std::vector<std::string>& names, const std::vector<Layout>& layouts) {
    auto ids = [](const Layout& l) {
        std::set<std::string> s;
        for (const auto& n : l.nodes) {
            if (!n.is_virtual) s.insert(n.id);
        }
        return s;
    };
    if (layouts.empty()) return;
    const auto first = ids(layouts.front());
    for (std::size_t i = 1; i < layouts.size(); ++i) {
        const auto other = ids(layouts[i]);
        if (other == first) continue;
        std::vector<std::string> diff;
        std::set_symmetric_difference(first.begin(), first.end(), other.begin(), other.end(),
                                      std::back_inserter(diff));
        throw PreconditionError("node sets differ between " + names.front() + " and " + names[i] +
                                " (first mismatch: '" + diff.front() + "')");
    }
}

} // namespace veil::metrics
