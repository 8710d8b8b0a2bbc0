#pragma once

#include <vector>

#include "veil/cfg/analysis.hpp"
#include "veil/layout/layered_graph.hpp"
#include "veil/layout/layout.hpp"
#include "veil/layout/ranking.hpp"

namespace veil::layout {

/// Grid x per slot: dx * (ord - |BackDummies in rank|) in grouped mode,
/// dx * ord in indent mode.
std::vector<double> initial_x(const LayeredGraph& lg, double dx, Mode mode);

/// Puts every dummy of one chain on a common x: the chain minimum for Back
/// edges, the maximum otherwise. Real-node entries are left untouched.
void straighten_edges(const LayeredGraph& lg, const EdgeClassification& cls,
                      std::vector<double>& slot_x);

/// Drops interior points that lie on the segment between their neighbors.
std::vector<Point> elide_collinear(std::vector<Point> points, double epsilon = 1e-6);

/// Throws PreconditionError when dx or dy does not exceed every node size.
void check_spacing(const CfgGraph& g, const LayoutConfig& config);

Layout assign_coordinates(const CfgGraph& g, const EdgeClassification& cls,
                          const LayeredGraph& lg, const LayoutConfig& config);

/// Every intermediate product of one layout run.
struct PipelineResult {
    CfgGraph graph; // after sink normalization
    EdgeClassification classes;
    DominatorInfo dominators;
    RankingTrace trace;
    RankAssignment ranks;
    LayeredGraph layered;
    CrossingStats crossing_stats;
    Layout layout;
};

PipelineResult run_pipeline(const CfgGraph& g, const LayoutConfig& config);

/// ensure_single_sink, classify_edges, dominator trees, assign_layers,
/// normalize_edges, minimize_crossings, assign_coordinates.
Layout layout(const CfgGraph& g, const LayoutConfig& config = {});

} // namespace veil::layout
