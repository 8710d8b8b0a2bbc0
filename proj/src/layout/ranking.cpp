#include "veil/layout/ranking.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_set>

#include "veil/errors.hpp"

namespace veil::layout {

std::vector<NodeId> back_edge_sources(const RankingContext& ctx, NodeId v) {
    std::vector<NodeId> result;
    for (EdgeId e : ctx.graph.in_edges(v)) {
        const NodeId u = ctx.graph.edge(e).src;
        if (u != v && ctx.classes.is_back(e)) result.push_back(u);
    }
    return result;
}

std::vector<NodeId> forward_successors(const RankingContext& ctx, NodeId v) {
    std::vector<NodeId> result;
    for (EdgeId e : ctx.graph.out_edges(v)) {
        if (!ctx.classes.is_back(e)) result.push_back(ctx.graph.edge(e).dst);
    }
    return result;
}

bool is_regular_loop(const RankingContext& ctx, NodeId /*v*/, std::span<const NodeId> successors,
                     std::span<const NodeId> back_sources) {
    for (NodeId u : back_sources) {
        for (NodeId w : successors) {
            if (!ctx.dominators.post_dominates(u, w)) return true;
        }
    }
    return false;
}

std::optional<LoopExit> handle_loop(const RankingContext& ctx, NodeId v, int v_rank,
                                    std::span<const NodeId> back_sources) {
    const auto& dom = ctx.dominators;
    std::optional<NodeId> best;
    auto pdom_depth = [&](NodeId n) {
        return dom.postdom.contains(n) ? dom.postdom.depth(n)
                                       : std::numeric_limits<std::uint32_t>::max();
    };
    // Natural loop of v: v plus the nodes it dominates that reach a back-edge
    // source without passing v. A successor inside it cannot be the exit, and
    // its size is |loop|.
    const auto& graph = ctx.graph;
    std::unordered_set<std::uint32_t> in_loop{v.value};
    std::vector<NodeId> members{v};
    std::vector<NodeId> work;
    auto add = [&](NodeId n) {
        if (dom.dominates(v, n) && in_loop.insert(n.value).second) {
            members.push_back(n);
            work.push_back(n);
        }
    };
    for (NodeId u : back_sources) add(u);
    while (!work.empty()) {
        const NodeId n = work.back();
        work.pop_back();
        for (EdgeId e : graph.in_edges(n)) add(graph.edge(e).src);
    }

    for (NodeId w : forward_successors(ctx, v)) {
        bool excluded = in_loop.count(w.value) > 0;
        for (NodeId u : back_sources) {
            if (w == u || dom.dominates(w, u) || dom.post_dominates(u, w)) {
                excluded = true;
                break;
            }
        }
        if (excluded) continue;
        if (!best || pdom_depth(w) < pdom_depth(*best)) best = w;
    }
    if (!best) return std::nullopt;

    LoopExit result{*best, 0, std::move(members)};
    std::sort(result.body.begin(), result.body.end());
    result.exit_rank = v_rank + static_cast<int>(result.body.size()) + 1;
    return result;
}

std::optional<BranchMerge> handle_branch(const RankingContext& ctx, NodeId v, int v_rank) {
    const auto& dom = ctx.dominators;
    const auto merge = dom.ipdom(v);
    if (!merge || *merge == v) return std::nullopt;
    const int cond = static_cast<int>(dom.dom_subtree_size(v)) -
                     static_cast<int>(dom.dom_subtree_size(*merge));
    return BranchMerge{*merge, v_rank + std::max(cond, 0) + 1};
}

std::vector<int> traverse_ranks(const RankingContext& ctx, RankingTrace* trace) {
    const auto& g = ctx.graph;
    const std::size_t n = g.node_count();
    std::vector<int> rank(n, 0);
    std::vector<bool> visited(n, false);
    std::deque<std::pair<NodeId, int>> queue;
    int deepest = 0;

    auto drain = [&] {
        while (!queue.empty()) {
            const auto [v, r] = queue.front();
            queue.pop_front();
            rank[v.value] = std::max(rank[v.value], r);
            deepest = std::max(deepest, rank[v.value]);
            if (visited[v.value]) continue;
            visited[v.value] = true;
            const int vr = rank[v.value];
            const auto successors = forward_successors(ctx, v);

            // Dominator queries are only meaningful inside the entry's component.
            if (ctx.classes.reachable(v)) {
                bool loop_handled = false;
                const auto backs = back_edge_sources(ctx, v);
                if (!backs.empty() && is_regular_loop(ctx, v, successors, backs)) {
                    if (auto exit = handle_loop(ctx, v, vr, backs)) {
                        queue.emplace_back(exit->exit, exit->exit_rank);
                        loop_handled = true;
                        if (trace) {
                            trace->loops.push_back(
                                {v, exit->exit, exit->exit_rank, std::move(exit->body)});
                        }
                    } else if (trace) {
                        trace->loops_without_exit.push_back(v);
                    }
                }
                if (!loop_handled && successors.size() > 1) {
                    if (auto merge = handle_branch(ctx, v, vr)) {
                        queue.emplace_back(merge->merge, merge->merge_rank);
                        if (trace) trace->branches.push_back({v, merge->merge, merge->merge_rank});
                    }
                }
            }
            for (NodeId s : successors) queue.emplace_back(s, vr + 1);
        }
    };

    if (n == 0) return rank;
    queue.emplace_back(g.entry(), 0);
    drain();
    // Blocks the entry cannot reach go below everything ranked so far.
    for (NodeId u : ctx.classes.unreachable) {
        if (visited[u.value]) continue;
        queue.emplace_back(u, deepest + 1);
        drain();
    }
    return rank;
}

namespace {

/// Extra "must sit above" pairs implied by the loop and branch records.
std::vector<std::vector<NodeId>> ordering_constraints(const RankingContext& ctx,
                                                      const RankingTrace& trace) {
    const auto& g = ctx.graph;
    const std::size_t n = g.node_count();
    const auto sink = g.unique_sink();
    std::vector<std::vector<NodeId>> after(n);
    auto require = [&](NodeId above, NodeId below) {
        if (above == below || (sink && above == *sink)) return;
        after[above.value].push_back(below);
    };
    for (const auto& loop : trace.loops) {
        for (NodeId w : loop.body) require(w, loop.exit);
    }

    std::vector<std::vector<NodeId>> children(n);
    const auto& dom = ctx.dominators.dom;
    for (std::uint32_t i = 0; i < n; ++i) {
        const NodeId v{i};
        if (auto p = dom.idom(v); p && *p != v) children[p->value].push_back(v);
    }
    std::vector<NodeId> stack;
    for (const auto& branch : trace.branches) {
        if (sink && branch.merge == *sink) continue; // the sink is lifted anyway
        stack.assign(1, branch.split);
        while (!stack.empty()) {
            const NodeId w = stack.back();
            stack.pop_back();
            if (w == branch.merge) continue;
            require(w, branch.merge);
            for (NodeId c : children[w.value]) stack.push_back(c);
        }
    }
    return after;
}

/// One relaxation pass in topological order over non-Back edges plus `extra`.
/// Returns false, leaving `rank` untouched, if that graph has a cycle.
bool relax(const RankingContext& ctx, std::vector<int>& rank,
           const std::vector<std::vector<NodeId>>* extra) {
    const auto& g = ctx.graph;
    const std::size_t n = g.node_count();
    std::vector<std::uint32_t> indegree(n, 0);
    for (std::uint32_t i = 0; i < g.edge_count(); ++i) {
        if (!ctx.classes.is_back(EdgeId{i})) ++indegree[g.edge(EdgeId{i}).dst.value];
    }
    if (extra) {
        for (const auto& list : *extra) {
            for (NodeId w : list) ++indegree[w.value];
        }
    }
    std::vector<NodeId> ready;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push_back(NodeId{i});
    }
    std::vector<int> out = rank;
    auto visit = [&](NodeId v, NodeId w) {
        out[w.value] = std::max(out[w.value], out[v.value] + 1);
        if (--indegree[w.value] == 0) ready.push_back(w);
    };
    for (std::size_t head = 0; head < ready.size(); ++head) {
        const NodeId v = ready[head];
        for (EdgeId e : g.out_edges(v)) {
            if (!ctx.classes.is_back(e)) visit(v, g.edge(e).dst);
        }
        if (extra) {
            for (NodeId w : (*extra)[v.value]) visit(v, w);
        }
    }
    if (ready.size() != n) return false;
    rank = std::move(out);
    return true;
}

} // namespace

void repair_ranks(const RankingContext& ctx, std::vector<int>& rank, const RankingTrace* trace) {
    const auto& g = ctx.graph;
    bool done = false;
    if (trace) {
        const auto extra = ordering_constraints(ctx, *trace);
        done = relax(ctx, rank, &extra);
    }
    // Non-Back edges alone always form a DAG.
    if (!done) relax(ctx, rank, nullptr);
    if (auto sink = g.unique_sink()) {
        const int deepest = *std::max_element(rank.begin(), rank.end());
        rank[sink->value] = std::max(rank[sink->value], deepest);
    }
}

RankAssignment contract_empty_ranks(std::span<const int> rank) {
    std::vector<int> occupied(rank.begin(), rank.end());
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
    RankAssignment result;
    result.rank.reserve(rank.size());
    for (int r : rank) {
        const auto it = std::lower_bound(occupied.begin(), occupied.end(), r);
        result.rank.push_back(static_cast<int>(it - occupied.begin()));
    }
    result.num_ranks = static_cast<int>(occupied.size());
    return result;
}

RankAssignment assign_layers(const CfgGraph& g, const EdgeClassification& cls,
                             const DominatorInfo& dom, RankingTrace* trace) {
    if (!g.unique_sink()) {
        throw PreconditionError("layer assignment needs a single-sink graph");
    }
    const RankingContext ctx{g, cls, dom};
    RankingTrace local;
    RankingTrace& recorded = trace ? *trace : local;
    auto rank = traverse_ranks(ctx, &recorded);
    repair_ranks(ctx, rank, &recorded);
    return contract_empty_ranks(rank);
}

} // namespace veil::layout
