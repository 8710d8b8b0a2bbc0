#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "veil/layout/layout.hpp"

namespace veil::metrics {

using layout::Layout;
using layout::Point;

/// |V| / ((w+1)(h+1)) where w+1 and h+1 count the distinct node-center x and
/// y values after snapping to a 1 px lattice. Virtual nodes are ignored.
double node_orthogonality(const Layout& l);

/// 1 - mean over all polyline segments of min(t, |90-t|, 180-t) / 45, with t
/// the segment angle in degrees. 1 when there are no segments.
double edge_orthogonality(const Layout& l);

/// Intersection points between segments of distinct edges, deduplicated per
/// edge pair. Points that coincide with the first or last point of either
/// polyline are not counted. Each pair of overlapping collinear segments
/// counts once.
std::uint64_t count_crossings(const Layout& l);

/// Interior polyline points farther than `epsilon` from the line through
/// their neighbors.
std::uint64_t count_bends(const Layout& l, double epsilon = 0.5);

struct EdgeLengthStats {
    double total = 0.0;
    double max = 0.0;
    double median = 0.0;
    double mad_log = 0.0; // median |ln L - ln median|
};

EdgeLengthStats edge_length_stats(const Layout& l);

double graph_area(const Layout& l);

struct Tension {
    double sum = 0.0;
    double median = 0.0;
};

/// Spring tension per node: repulsion from every other node (L^2 / ln d) plus
/// attraction toward each successor and predecessor (ln(d)^2 / L). Distances
/// are clamped to >= 2 px and ln(d) to >= 0.1. `unit_length` defaults to dy.
Tension symmetry_tension(const Layout& l, std::optional<double> unit_length = std::nullopt);

/// Per-node ranks keyed by position in `l.nodes`. Native ranks are used when
/// every node carries one; otherwise y centers are binned at 5 px.
struct Ranks {
    std::vector<int> of;
    int count = 0;
    bool derived = false;
};

Ranks layout_ranks(const Layout& l);

/// Share of edges whose source rank is smaller than their target rank.
double consistent_flow(const Layout& l);

/// exit.rank / (num_ranks - 1), 1 for a single rank. The exit is the virtual
/// sink, else the unique node without outgoing edges. nullopt, with a reason
/// in `diagnostic`, when there is no such node.
std::optional<double> happens_before_score(const Layout& l, std::string* diagnostic = nullptr);

struct GroupingDistance {
    std::optional<double> median;          // both classes pooled
    std::optional<double> back_median;
    std::optional<double> forward_median;
    std::size_t back_pairs = 0;
    std::size_t forward_pairs = 0;
};

/// Median distance between pairs of Back edges and pairs of long non-Back
/// edges (vertical span >= 2 dy) whose y extents overlap.
GroupingDistance edge_grouping_distance(const Layout& l);

struct MetricsReport {
    double node_orthogonality = 1.0;
    double edge_orthogonality = 1.0;
    std::uint64_t crossings = 0;
    std::uint64_t bends = 0;
    double mad_log_edge_length = 0.0;
    double edge_length_total = 0.0;
    double edge_length_max = 0.0;
    double edge_length_median = 0.0;
    double area = 0.0;
    double tension_sum = 0.0;
    double tension_median = 0.0;
    double consistent_flow = 1.0;
    std::optional<double> happens_before;
    std::optional<double> grouping_distance_median;
    std::optional<double> grouping_distance_back_median;
    std::optional<double> grouping_distance_forward_median;
    std::optional<double> layout_time_ms;

    // metadata
    std::string mode;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    bool ranks_derived = false;
    std::vector<std::string> diagnostics;

    bool operator==(const MetricsReport&) const = default;
};

struct ReportOptions {
    double bend_epsilon = 0.5;
    std::optional<double> unit_length;
    std::optional<double> layout_time_ms;
};

MetricsReport metrics_report(const Layout& l, const ReportOptions& options = {});

std::string to_json(const MetricsReport& r);
/// Throws ParseError.
MetricsReport parse_metrics_json(std::string_view text);

/// One metric per row: name, direction arrow, value.
std::string to_table(const MetricsReport& r);

/// Column per report; after the first, each value column is followed by its
/// difference to the first report.
std::string compare_table(const std::vector<std::string>& names,
                          const std::vector<MetricsReport>& reports);

/// Throws PreconditionError unless all layouts draw the same set of
/// (non-virtual) node ids.
void require_same_nodes(const std::vector<std::string>& names, const std::vector<Layout>& layouts);

/// Graphviz `-Tplain` output as an imported Layout: inches scaled by 72,
/// y flipped so rank grows downward, edge kind Back when the target sits above
/// the source. Ranks are left unset. Throws ParseError.
Layout import_graphviz_plain(std::string_view text);

} // namespace veil::metrics
