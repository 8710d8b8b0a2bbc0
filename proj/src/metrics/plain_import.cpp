#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "veil/errors.hpp"
#include "veil/metrics/metrics.hpp"

namespace veil::metrics {
namespace {

constexpr double kPointsPerInch = 72.0;

/// Splits one line of Graphviz plain output; double-quoted fields may hold
/// spaces and backslash escapes.
std::vector<std::string> fields(std::string_view line, std::size_t line_no) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        std::string tok;
        if (line[i] == '"') {
            const std::size_t start = i++;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    tok += line[i + 1];
                    i += 2;
                } else if (line[i] == '"') {
                    ++i;
                    closed = true;
                    break;
                } else {
                    tok += line[i++];
                }
            }
            if (!closed) throw ParseError("unterminated string", line_no, start + 1);
        } else {
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
                tok += line[i++];
            }
        }
        out.push_back(std::move(tok));
    }
    return out;
}

double to_number(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("expected a number, got '" + s + "'", line_no, 1);
    }
    return v;
}

} // namespace

Layout import_graphviz_plain(std::string_view text) {
    Layout out;
    out.config.mode = layout::Mode::Imported;
    double height = 0.0;
    bool have_graph = false;
    std::unordered_map<std::string, std::size_t> index;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto f = fields(line, line_no);
        if (f.empty()) continue;
        const std::string& kind = f[0];
        if (kind == "graph") {
            if (f.size() < 4) throw ParseError("graph line needs scale, width, height", line_no, 1);
            height = to_number(f[3], line_no) * kPointsPerInch;
            have_graph = true;
        } else if (kind == "node") {
            if (!have_graph) throw ParseError("node line before graph line", line_no, 1);
            if (f.size() < 6) throw ParseError("node line needs name, x, y, width, height", line_no, 1);
            layout::LayoutNode n;
            n.id = f[1];
            n.center = {to_number(f[2], line_no) * kPointsPerInch,
                        height - to_number(f[3], line_no) * kPointsPerInch};
            n.size = {to_number(f[4], line_no) * kPointsPerInch,
                      to_number(f[5], line_no) * kPointsPerInch};
            if (f.size() > 6 && f[6] != n.id) n.label = f[6];
            if (!index.emplace(n.id, out.nodes.size()).second) {
                throw ParseError("duplicate node '" + n.id + "'", line_no, 1);
            }
            out.nodes.push_back(std::move(n));
        } else if (kind == "edge") {
            if (f.size() < 4) throw ParseError("edge line needs tail, head, point count", line_no, 1);
            layout::LayoutEdge e;
            e.src = f[1];
            e.dst = f[2];
            const auto s = index.find(e.src);
            const auto d = index.find(e.dst);
            if (s == index.end() || d == index.end()) {
                throw ParseError("edge references an unknown node", line_no, 1);
            }
            const auto count = static_cast<std::size_t>(to_number(f[3], line_no));
            if (count < 2 || f.size() < 4 + 2 * count) {
                throw ParseError("edge line has too few points", line_no, 1);
            }
            for (std::size_t k = 0; k < count; ++k) {
                e.points.push_back({to_number(f[4 + 2 * k], line_no) * kPointsPerInch,
                                    height - to_number(f[5 + 2 * k], line_no) * kPointsPerInch});
            }
            const auto& src = out.nodes[s->second];
            const auto& dst = out.nodes[d->second];
            e.kind = (s == d || dst.center.y < src.center.y) ? cfg::EdgeKind::Back
                                                             : cfg::EdgeKind::Tree;
            out.edges.push_back(std::move(e));
        } else if (kind == "stop") {
            break;
        } else {
            throw ParseError("unknown statement '" + kind + "'", line_no, 1);
        }
    }
    if (!have_graph) throw ParseError("missing graph line");
    out.bbox = layout::compute_bbox(out.nodes, out.edges);

    // The rank pitch stands in for dy (unit length, long-edge threshold).
    const auto ranks = layout_ranks(out);
    if (ranks.count >= 2) {
        std::vector<double> first_y(static_cast<std::size_t>(ranks.count), 0.0);
        for (std::size_t i = 0; i < out.nodes.size(); ++i) {
            first_y[static_cast<std::size_t>(ranks.of[i])] = out.nodes[i].center.y;
        }
        std::vector<double> gaps;
        for (std::size_t r = 1; r < first_y.size(); ++r) gaps.push_back(first_y[r] - first_y[r - 1]);
        std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2),
                         gaps.end());
        if (gaps[gaps.size() / 2] > 0.0) out.config.dy = gaps[gaps.size() / 2];
    }
    return out;
}

} // namespace veil::metrics
