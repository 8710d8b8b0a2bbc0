#include "veil/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

namespace veil::metrics {
namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lo + hi) / 2;
}

double length(const std::vector<Point>& pts) {
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        total += std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
    }
    return total;
}

/// Coordinate tolerance that follows the drawing's extent.
double tolerance(const Layout& l) {
    const double extent = std::max({l.bbox.width(), l.bbox.height(), 1.0});
    return 1e-9 * extent;
}

std::unordered_map<std::string, std::size_t> node_index(const Layout& l) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < l.nodes.size(); ++i) index.emplace(l.nodes[i].id, i);
    return index;
}

std::size_t distinct_snapped(std::vector<double> values) {
    if (values.empty()) return 0;
    const double base = *std::min_element(values.begin(), values.end());
    std::set<long long> cells;
    for (double v : values) cells.insert(std::llround(v - base));
    return cells.size();
}

// Segment geometry for crossing counting.

struct Seg {
    Point a;
    Point b;
    std::uint32_t edge;
    double min_y;
    double max_y;
};

double signed_distance(Point a, Point b, Point p) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len = std::hypot(vx, vy);
    if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
    return (vx * (p.y - a.y) - vy * (p.x - a.x)) / len;
}

int sign(double v, double eps) { return v > eps ? 1 : (v < -eps ? -1 : 0); }

bool near(Point p, Point q, double eps) {
    return std::abs(p.x - q.x) <= eps && std::abs(p.y - q.y) <= eps;
}

enum class Contact { None, Point, Overlap };

/// Contact between two non-degenerate segments; `at` is set for Point.
Contact contact(const Seg& s, const Seg& t, double eps, Point& at) {
    const int d1 = sign(signed_distance(s.a, s.b, t.a), eps);
    const int d2 = sign(signed_distance(s.a, s.b, t.b), eps);
    if (d1 == 0 && d2 == 0) {
        // Collinear: compare extents along s.
        const double vx = s.b.x - s.a.x;
        const double vy = s.b.y - s.a.y;
        const double len = std::hypot(vx, vy);
        auto along = [&](Point p) { return ((p.x - s.a.x) * vx + (p.y - s.a.y) * vy) / len; };
        const double t0 = std::min(along(t.a), along(t.b));
        const double t1 = std::max(along(t.a), along(t.b));
        const double lo = std::max(0.0, t0);
        const double hi = std::min(len, t1);
        if (hi - lo > eps) return Contact::Overlap;
        if (hi - lo < -eps) return Contact::None;
        const double m = (lo + hi) / 2;
        at = {s.a.x + vx * m / len, s.a.y + vy * m / len};
        return Contact::Point;
    }
    if (d1 * d2 > 0) return Contact::None;
    const int d3 = sign(signed_distance(t.a, t.b, s.a), eps);
    const int d4 = sign(signed_distance(t.a, t.b, s.b), eps);
    if (d3 * d4 > 0) return Contact::None;
    if (d3 == 0 && d4 == 0) return Contact::None; // s degenerate along t: handled above
    if (d1 == 0) {
        at = t.a;
    } else if (d2 == 0) {
        at = t.b;
    } else if (d3 == 0) {
        at = s.a;
    } else if (d4 == 0) {
        at = s.b;
    } else {
        const double e1 = signed_distance(s.a, s.b, t.a);
        const double e2 = signed_distance(s.a, s.b, t.b);
        const double f = e1 / (e1 - e2);
        at = {t.a.x + (t.b.x - t.a.x) * f, t.a.y + (t.b.y - t.a.y) * f};
    }
    return Contact::Point;
}

/// Distance from p to segment ab.
double point_segment(Point p, Point a, Point b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

double segment_segment(Point a, Point b, Point c, Point d, double eps) {
    Seg s{a, b, 0, 0, 0};
    Seg t{c, d, 1, 0, 0};
    Point at;
    if (!(a == b) && !(c == d) && contact(s, t, eps, at) != Contact::None) return 0.0;
    return std::min({point_segment(a, c, d), point_segment(b, c, d), point_segment(c, a, b),
                     point_segment(d, a, b)});
}

double polyline_distance(const std::vector<Point>& p, const std::vector<Point>& q, double eps) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < p.size(); ++i) {
        for (std::size_t j = 1; j < q.size(); ++j) {
            best = std::min(best, segment_segment(p[i - 1], p[i], q[j - 1], q[j], eps));
        }
    }
    if (p.size() == 1 || q.size() == 1) {
        for (const auto& a : p) {
            for (const auto& b : q) best = std::min(best, std::hypot(a.x - b.x, a.y - b.y));
        }
    }
    return best;
}

struct YExtent {
    double lo;
    double hi;
};

YExtent y_extent(const std::vector<Point>& pts) {
    YExtent e{pts.front().y, pts.front().y};
    for (const auto& p : pts) {
        e.lo = std::min(e.lo, p.y);
        e.hi = std::max(e.hi, p.y);
    }
    return e;
}

/// Smallest |x| gap between vertical segments of both polylines inside
/// [lo, hi]; nullopt if either has none there.
std::optional<double> vertical_gap(const std::vector<Point>& p, const std::vector<Point>& q,
                                   double lo, double hi, double eps) {
    auto verticals = [&](const std::vector<Point>& pts) {
        std::vector<std::pair<double, YExtent>> out;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (std::abs(pts[i].x - pts[i - 1].x) > eps) continue;
            const double a = std::max(lo, std::min(pts[i].y, pts[i - 1].y));
            const double b = std::min(hi, std::max(pts[i].y, pts[i - 1].y));
            if (b - a > eps) out.push_back({pts[i].x, {a, b}});
        }
        return out;
    };
    const auto vp = verticals(p);
    const auto vq = verticals(q);
    std::optional<double> best;
    for (const auto& [xa, ea] : vp) {
        for (const auto& [xb, eb] : vq) {
            if (std::min(ea.hi, eb.hi) - std::max(ea.lo, eb.lo) <= eps) continue;
            const double d = std::abs(xa - xb);
            if (!best || d < *best) best = d;
        }
    }
    return best;
}

} // namespace

double node_orthogonality(const Layout& l) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& n : l.nodes) {
        if (n.is_virtual) continue;
        xs.push_back(n.center.x);
        ys.push_back(n.center.y);
    }
    if (xs.empty()) return 1.0;
    const double cells = static_cast<double>(distinct_snapped(xs) * distinct_snapped(ys));
    return static_cast<double>(xs.size()) / cells;
}

double edge_orthogonality(const Layout& l) {
    double deviation = 0.0;
    std::size_t segments = 0;
    for (const auto& e : l.edges) {
        for (std::size_t i = 1; i < e.points.size(); ++i) {
            const double dx = e.points[i].x - e.points[i - 1].x;
            const double dy = e.points[i].y - e.points[i - 1].y;
            if (dx == 0.0 && dy == 0.0) continue;
            double theta = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
            if (theta < 0.0) theta += 180.0;
            if (theta >= 180.0) theta -= 180.0;
            deviation += std::min({theta, std::abs(90.0 - theta), 180.0 - theta}) / 45.0;
            ++segments;
        }
    }
    if (segments == 0) return 1.0;
    return 1.0 - deviation / static_cast<double>(segments);
}

std::uint64_t count_crossings(const Layout& l) {
    const double eps = tolerance(l);
    std::vector<Seg> segs;
    for (std::uint32_t e = 0; e < l.edges.size(); ++e) {
        const auto& pts = l.edges[e].points;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (near(pts[i - 1], pts[i], eps)) continue;
            segs.push_back({pts[i - 1], pts[i], e, std::min(pts[i - 1].y, pts[i].y),
                            std::max(pts[i - 1].y, pts[i].y)});
        }
    }
    std::sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) {
        if (a.min_y != b.min_y) return a.min_y < b.min_y;
        return a.edge < b.edge;
    });

    auto anchored = [&](std::uint32_t e, Point p) {
        const auto& pts = l.edges[e].points;
        return near(p, pts.front(), eps) || near(p, pts.back(), eps);
    };

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Point>> points;
    std::uint64_t overlaps = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 1; j < segs.size() && segs[j].min_y <= segs[i].max_y + eps; ++j) {
            const Seg& s = segs[i];
            const Seg& t = segs[j];
            if (s.edge == t.edge) continue;
            Point at;
            const Contact c = contact(s, t, eps, at);
            if (c == Contact::Overlap) {
                ++overlaps;
            } else if (c == Contact::Point) {
                if (anchored(s.edge, at) || anchored(t.edge, at)) continue;
                auto& seen = points[{std::min(s.edge, t.edge), std::max(s.edge, t.edge)}];
                if (std::none_of(seen.begin(), seen.end(),
                                 [&](Point q) { return near(q, at, eps); })) {
                    seen.push_back(at);
                }
            }
        }
    }
    std::uint64_t total = overlaps;
    for (const auto& [pair, pts] : points) total += pts.size();
    return total;
}

std::uint64_t count_bends(const Layout& l, double epsilon) {
    std::uint64_t bends = 0;
    for (const auto& e : l.edges) {
        for (std::size_t i = 1; i + 1 < e.points.size(); ++i) {
            if (std::abs(signed_distance(e.points[i - 1], e.points[i + 1], e.points[i])) > epsilon) {
                ++bends;
            }
        }
    }
    return bends;
}

EdgeLengthStats edge_length_stats(const Layout& l) {
    EdgeLengthStats s;
    std::vector<double> lengths;
    for (const auto& e : l.edges) {
        const double len = length(e.points);
        lengths.push_back(len);
        s.total += len;
        s.max = std::max(s.max, len);
    }
    if (lengths.empty()) return s;
    s.median = median_of(lengths);
    if (s.median > 0.0) {
        const double ln_median = std::log(s.median);
        std::vector<double> deviations;
        for (double len : lengths) {
            if (len > 0.0) deviations.push_back(std::abs(std::log(len) - ln_median));
        }
        s.mad_log = median_of(std::move(deviations));
    }
    return s;
}

double graph_area(const Layout& l) { return l.bbox.width() * l.bbox.height(); }

Tension symmetry_tension(const Layout& l, std::optional<double> unit_length) {
    const double lu = unit_length.value_or(l.config.dy);
    std::vector<std::size_t> real;
    for (std::size_t i = 0; i < l.nodes.size(); ++i) {
        if (!l.nodes[i].is_virtual) real.push_back(i);
    }
    const auto index = node_index(l);
    std::vector<std::vector<std::size_t>> neighbors(l.nodes.size());
    for (const auto& e : l.edges) {
        const std::size_t s = index.at(e.src);
        const std::size_t d = index.at(e.dst);
        if (s == d) continue;
        neighbors[s].push_back(d); // successor
        neighbors[d].push_back(s); // predecessor
    }

    // Unit vector from w to v and the clamped distance.
    auto displacement = [&](std::size_t v, std::size_t w, double& ux, double& uy) {
        const double dx = l.nodes[v].center.x - l.nodes[w].center.x;
        const double dy = l.nodes[v].center.y - l.nodes[w].center.y;
        const double d = std::hypot(dx, dy);
        ux = d > 0.0 ? dx / d : 0.0;
        uy = d > 0.0 ? dy / d : 0.0;
        return std::max(d, 2.0);
    };

    std::vector<double> magnitudes;
    Tension t;
    for (std::size_t v : real) {
        double fx = 0.0;
        double fy = 0.0;
        for (std::size_t w : real) {
            if (w == v) continue;
            double ux, uy;
            const double d = displacement(v, w, ux, uy);
            const double f = lu * lu / std::max(std::log(d), 0.1);
            fx += ux * f;
            fy += uy * f;
        }
        for (std::size_t w : neighbors[v]) {
            if (l.nodes[w].is_virtual) continue;
            double ux, uy;
            const double d = displacement(v, w, ux, uy);
            const double ln = std::max(std::log(d), 0.1);
            const double f = ln * ln / lu;
            fx -= ux * f;
            fy -= uy * f;
        }
        const double m = std::hypot(fx, fy);
        t.sum += m;
        magnitudes.push_back(m);
    }
    t.median = median_of(std::move(magnitudes));
    return t;
}

Ranks layout_ranks(const Layout& l) {
    Ranks r;
    r.of.assign(l.nodes.size(), 0);
    const bool native = !l.nodes.empty() && std::all_of(l.nodes.begin(), l.nodes.end(),
                                                        [](const auto& n) { return n.rank; });
    if (native) {
        for (std::size_t i = 0; i < l.nodes.size(); ++i) {
            r.of[i] = *l.nodes[i].rank;
            r.count = std::max(r.count, r.of[i] + 1);
        }
        return r;
    }
    r.derived = true;
    if (l.nodes.empty()) return r;
    double base = l.nodes.front().center.y;
    for (const auto& n : l.nodes) base = std::min(base, n.center.y);
    std::vector<long long> bins;
    for (const auto& n : l.nodes) bins.push_back(std::llround((n.center.y - base) / 5.0));
    std::vector<long long> distinct = bins;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < bins.size(); ++i) {
        r.of[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), bins[i]) -
                                   distinct.begin());
    }
    r.count = static_cast<int>(distinct.size());
    return r;
}

double consistent_flow(const Layout& l) {
    if (l.edges.empty()) return 1.0;
    const auto ranks = layout_ranks(l);
    const auto index = node_index(l);
    std::size_t descending = 0;
    for (const auto& e : l.edges) {
        if (ranks.of[index.at(e.src)] < ranks.of[index.at(e.dst)]) ++descending;
    }
    return static_cast<double>(descending) / static_cast<double>(l.edges.size());
}

std::optional<double> happens_before_score(const Layout& l, std::string* diagnostic) {
    std::optional<std::size_t> exit;
    for (std::size_t i = 0; i < l.nodes.size(); ++i) {
        if (l.nodes[i].is_virtual) exit = i;
    }
    if (!exit) {
        std::vector<bool> has_out(l.nodes.size(), false);
        const auto index = node_index(l);
        for (const auto& e : l.edges) has_out[index.at(e.src)] = true;
        std::vector<std::size_t> sinks;
        for (std::size_t i = 0; i < l.nodes.size(); ++i) {
            if (!has_out[i]) sinks.push_back(i);
        }
        if (sinks.size() != 1) {
            if (diagnostic) {
                *diagnostic = sinks.empty() ? "happens_before: no sink node"
                                            : "happens_before: " + std::to_string(sinks.size()) +
                                                  " sink nodes and no virtual sink";
            }
            return std::nullopt;
        }
        exit = sinks.front();
    }
    const auto ranks = layout_ranks(l);
    if (ranks.count <= 1) return 1.0;
    return static_cast<double>(ranks.of[*exit]) / static_cast<double>(ranks.count - 1);
}

GroupingDistance edge_grouping_distance(const Layout& l) {
    const double eps = tolerance(l);
    std::vector<std::size_t> back;
    std::vector<std::size_t> forward;
    for (std::size_t i = 0; i < l.edges.size(); ++i) {
        const auto& e = l.edges[i];
        if (e.src == e.dst) continue;
        if (e.kind == cfg::EdgeKind::Back) {
            back.push_back(i);
        } else {
            const auto ext = y_extent(e.points);
            if (ext.hi - ext.lo >= 2 * l.config.dy - eps) forward.push_back(i);
        }
    }

    auto distances = [&](const std::vector<std::size_t>& group) {
        std::vector<double> out;
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                const auto& p = l.edges[group[i]].points;
                const auto& q = l.edges[group[j]].points;
                const auto ep = y_extent(p);
                const auto eq = y_extent(q);
                const double lo = std::max(ep.lo, eq.lo);
                const double hi = std::min(ep.hi, eq.hi);
                if (hi - lo <= eps) continue;
                auto gap = vertical_gap(p, q, lo, hi, eps);
                out.push_back(gap ? *gap : polyline_distance(p, q, eps));
            }
        }
        return out;
    };

    GroupingDistance g;
    const auto db = distances(back);
    const auto df = distances(forward);
    g.back_pairs = db.size();
    g.forward_pairs = df.size();
    if (!db.empty()) g.back_median = median_of(db);
    if (!df.empty()) g.forward_median = median_of(df);
    std::vector<double> pooled = db;
    pooled.insert(pooled.end(), df.begin(), df.end());
    if (!pooled.empty()) g.median = median_of(std::move(pooled));
    return g;
}

MetricsReport metrics_report(const Layout& l, const ReportOptions& options) {
    MetricsReport r;
    r.mode = layout::to_string(l.config.mode);
    for (const auto& n : l.nodes) {
        if (!n.is_virtual) ++r.nodes;
    }
    r.edges = l.edges.size();
    r.node_orthogonality = node_orthogonality(l);
    r.edge_orthogonality = edge_orthogonality(l);
    r.crossings = count_crossings(l);
    r.bends = count_bends(l, options.bend_epsilon);
    const auto lengths = edge_length_stats(l);
    r.mad_log_edge_length = lengths.mad_log;
    r.edge_length_total = lengths.total;
    r.edge_length_max = lengths.max;
    r.edge_length_median = lengths.median;
    r.area = graph_area(l);
    const auto tension = symmetry_tension(l, options.unit_length);
    r.tension_sum = tension.sum;
    r.tension_median = tension.median;
    r.consistent_flow = consistent_flow(l);
    std::string diagnostic;
    r.happens_before = happens_before_score(l, &diagnostic);
    if (!r.happens_before) r.diagnostics.push_back(diagnostic);
    const auto grouping = edge_grouping_distance(l);
    r.grouping_distance_median = grouping.median;
    r.grouping_distance_back_median = grouping.back_median;
    r.grouping_distance_forward_median = grouping.forward_median;
    if (!grouping.median) r.diagnostics.push_back("grouping_distance: no eligible edge pair");
    r.ranks_derived = layout_ranks(l).derived;
    r.layout_time_ms = options.layout_time_ms;
    return r;
}

} // namespace veil::metrics
