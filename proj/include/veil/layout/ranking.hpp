#pragma once

#include <optional>
#include <span>
#include <vector>

#include "veil/cfg/analysis.hpp"
#include "veil/cfg/graph.hpp"

namespace veil::layout {

using cfg::CfgGraph;
using cfg::DominatorInfo;
using cfg::EdgeClassification;
using cfg::EdgeId;
using cfg::NodeId;

/// A regular loop found during ranking.
struct LoopRecord {
    NodeId header;
    NodeId exit;
    int exit_rank = 0;
    /// Nodes counted into |loop| (header included, exit excluded).
    std::vector<NodeId> body;
};

/// A conditional split and the merge point pushed for it.
struct BranchRecord {
    NodeId split;
    NodeId merge;
    int merge_rank = 0;
};

struct RankingTrace {
    std::vector<LoopRecord> loops;
    std::vector<BranchRecord> branches;
    /// Headers whose regular-loop test passed but that have no exit candidate.
    std::vector<NodeId> loops_without_exit;
};

struct RankAssignment {
    std::vector<int> rank; // indexed by NodeId
    int num_ranks = 0;

    int of(NodeId n) const { return rank[n.value]; }
    bool operator==(const RankAssignment&) const = default;
};

/// Read-only inputs shared by the ranking steps.
struct RankingContext {
    const CfgGraph& graph;
    const EdgeClassification& classes;
    const DominatorInfo& dominators;
};

struct LoopExit {
    NodeId exit;
    int exit_rank = 0;
    std::vector<NodeId> body;
};

/// Sources of Back edges into v, excluding self-loops, in edge order.
std::vector<NodeId> back_edge_sources(const RankingContext& ctx, NodeId v);

/// Successors of v over non-Back edges, in edge order.
std::vector<NodeId> forward_successors(const RankingContext& ctx, NodeId v);

/// True when some forward successor of v escapes post-domination by some
/// back-edge source, i.e. v is the header of a while-style loop.
bool is_regular_loop(const RankingContext& ctx, NodeId v, std::span<const NodeId> successors,
                     std::span<const NodeId> back_sources);

/// Picks the loop exit among v's successors and computes its rank as
/// v_rank + |loop| + 1. |loop| is v's natural loop: v and the nodes it
/// dominates that reach a back-edge source without passing v. Successors inside
/// it are never exits. nullopt when no successor qualifies.
std::optional<LoopExit> handle_loop(const RankingContext& ctx, NodeId v, int v_rank,
                                    std::span<const NodeId> back_sources);

struct BranchMerge {
    NodeId merge;
    int merge_rank = 0;
};

/// Merge point of the split at v (its immediate post-dominator), ranked at
/// v_rank + |Dom(v)| - |Dom(merge)| + 1. nullopt if v cannot reach the sink.
std::optional<BranchMerge> handle_branch(const RankingContext& ctx, NodeId v, int v_rank);

/// The breadth-first traversal alone: ranks before repair and contraction.
std::vector<int> traverse_ranks(const RankingContext& ctx, RankingTrace* trace = nullptr);

/// Raises ranks along non-Back edges until every such edge points strictly
/// downward, then lifts the sink onto the deepest occupied rank.
///
/// With a trace, every recorded loop exit is also kept below the nodes counted
/// into its loop, and every recorded merge below the nodes its split dominates
/// outside the merge's own subtree. Those extra orderings are dropped when
/// they would close a cycle (irreducible input).
void repair_ranks(const RankingContext& ctx, std::vector<int>& rank,
                  const RankingTrace* trace = nullptr);

/// Order-preserving renumbering onto 0..k-1.
RankAssignment contract_empty_ranks(std::span<const int> rank);

/// Full layer assignment. Requires a single-sink graph.
RankAssignment assign_layers(const CfgGraph& g, const EdgeClassification& cls,
                             const DominatorInfo& dom, RankingTrace* trace = nullptr);

} // namespace veil::layout
