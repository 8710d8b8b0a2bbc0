#include "veil/layout/layered_graph.hpp"

#include <algorithm>
#include <numeric>

#include "veil/errors.hpp"

namespace veil::layout {

std::uint32_t LayeredGraph::back_dummies(std::size_t layer) const {
    std::uint32_t count = 0;
    for (SlotIndex s : layers[layer]) {
        if (slots[s].kind == SlotKind::BackDummy) ++count;
    }
    return count;
}

void LayeredGraph::renumber() {
    for (const auto& layer : layers) {
        for (std::uint32_t i = 0; i < layer.size(); ++i) ord[layer[i]] = i;
    }
}

LayeredGraph normalize_edges(const CfgGraph& g, const EdgeClassification& cls,
                             const RankAssignment& ranks) {
    LayeredGraph lg;
    lg.layers.resize(static_cast<std::size_t>(ranks.num_ranks));
    lg.slot_of_node.resize(g.node_count());
    lg.chains.resize(g.edge_count());

    auto add_slot = [&](Slot slot) {
        const auto index = static_cast<SlotIndex>(lg.slots.size());
        lg.slots.push_back(slot);
        lg.layers[static_cast<std::size_t>(slot.rank)].push_back(index);
        return index;
    };

    // Real nodes enter their layers in DFS discovery order.
    std::vector<NodeId> by_discovery;
    by_discovery.reserve(g.node_count());
    for (std::uint32_t i = 0; i < g.node_count(); ++i) by_discovery.push_back(NodeId{i});
    std::stable_sort(by_discovery.begin(), by_discovery.end(), [&](NodeId a, NodeId b) {
        return cls.dfs_order[a.value] < cls.dfs_order[b.value];
    });
    for (NodeId n : by_discovery) {
        lg.slot_of_node[n.value] = add_slot(Slot{SlotKind::Real, n, {}, ranks.of(n)});
    }

    for (std::uint32_t i = 0; i < g.edge_count(); ++i) {
        const EdgeId e{i};
        const auto& edge = g.edge(e);
        if (edge.src == edge.dst) continue;
        if (g.node(edge.src).is_virtual || g.node(edge.dst).is_virtual) continue;
        const bool back = cls.is_back(e);
        const NodeId top = back ? edge.dst : edge.src;
        const NodeId bottom = back ? edge.src : edge.dst;
        const int r_top = ranks.of(top);
        const int r_bottom = ranks.of(bottom);
        if (r_top >= r_bottom) {
            throw PreconditionError("edge " + g.node(edge.src).name + " -> " +
                                    g.node(edge.dst).name + " does not span ranks downward");
        }
        if (back && r_bottom - r_top == 1) continue;

        const SlotKind kind = back ? SlotKind::BackDummy : SlotKind::ForwardDummy;
        SlotIndex prev = lg.slot_of_node[top.value];
        for (int r = r_top + 1; r < r_bottom; ++r) {
            const SlotIndex d = add_slot(Slot{kind, {}, e, r});
            lg.chains[i].push_back(d);
            lg.segments.push_back({prev, d});
            prev = d;
        }
        lg.segments.push_back({prev, lg.slot_of_node[bottom.value]});
    }

    lg.up.resize(lg.slots.size());
    lg.down.resize(lg.slots.size());
    for (const auto& s : lg.segments) {
        lg.down[s.upper].push_back(s.lower);
        lg.up[s.lower].push_back(s.upper);
    }
    lg.ord.resize(lg.slots.size());
    lg.renumber();
    return lg;
}

namespace {

/// Inversion count with a Fenwick tree over lower-layer positions.
std::uint64_t count_between(const LayeredGraph& lg, std::size_t upper_layer,
                            std::vector<std::pair<std::uint32_t, std::uint32_t>>& scratch) {
    scratch.clear();
    for (SlotIndex u : lg.layers[upper_layer]) {
        for (SlotIndex w : lg.down[u]) scratch.emplace_back(lg.ord[u], lg.ord[w]);
    }
    if (scratch.size() < 2) return 0;
    std::sort(scratch.begin(), scratch.end());
    const std::size_t width = lg.layers[upper_layer + 1].size();
    std::vector<std::uint32_t> tree(width + 1, 0);
    std::uint64_t crossings = 0;
    std::uint64_t inserted = 0;
    for (const auto& [upper, lower] : scratch) {
        // Count earlier segments whose lower end lies strictly right of ours.
        std::uint64_t not_greater = 0;
        for (std::size_t i = lower + 1; i > 0; i -= i & (~i + 1)) not_greater += tree[i];
        crossings += inserted - not_greater;
        for (std::size_t i = lower + 1; i <= width; i += i & (~i + 1)) ++tree[i];
        ++inserted;
    }
    return crossings;
}

void presort(LayeredGraph& lg) {
    for (auto& layer : lg.layers) {
        auto rank_of = [&](SlotIndex s) {
            switch (lg.slots[s].kind) {
            case SlotKind::BackDummy: return 0;
            case SlotKind::Real: return 1;
            case SlotKind::ForwardDummy: return 2;
            }
            return 1;
        };
        std::stable_sort(layer.begin(), layer.end(),
                         [&](SlotIndex a, SlotIndex b) { return rank_of(a) < rank_of(b); });
    }
    lg.renumber();
}

/// Reorders [first, last) of `layer` by mean position of the given neighbors.
void barycenter_sort(LayeredGraph& lg, std::vector<SlotIndex>& layer, std::size_t first,
                     std::size_t last, const std::vector<std::vector<SlotIndex>>& neighbors) {
    if (last - first < 2) return;
    std::vector<std::pair<double, SlotIndex>> keyed;
    keyed.reserve(last - first);
    for (std::size_t i = first; i < last; ++i) {
        const SlotIndex s = layer[i];
        const auto& nb = neighbors[s];
        double key = static_cast<double>(lg.ord[s]);
        if (!nb.empty()) {
            double sum = 0.0;
            for (SlotIndex w : nb) sum += lg.ord[w];
            key = sum / static_cast<double>(nb.size());
        }
        keyed.emplace_back(key, s);
    }
    std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return lg.ord[a.second] < lg.ord[b.second];
    });
    for (std::size_t i = first; i < last; ++i) layer[i] = keyed[i - first].second;
}

struct Groups {
    std::size_t back_end;
    std::size_t real_end;
};

Groups groups_of(const LayeredGraph& lg, const std::vector<SlotIndex>& layer) {
    Groups g{0, 0};
    while (g.back_end < layer.size() && lg.slots[layer[g.back_end]].kind == SlotKind::BackDummy) {
        ++g.back_end;
    }
    g.real_end = g.back_end;
    while (g.real_end < layer.size() && lg.slots[layer[g.real_end]].kind == SlotKind::Real) {
        ++g.real_end;
    }
    return g;
}

void sweep_layer(LayeredGraph& lg, std::size_t l, bool downward) {
    auto& layer = lg.layers[l];
    const auto& neighbors = downward ? lg.up : lg.down;
    const Groups g = groups_of(lg, layer);
    barycenter_sort(lg, layer, g.back_end, g.real_end, neighbors);
    barycenter_sort(lg, layer, g.real_end, layer.size(), neighbors);
    for (std::uint32_t i = 0; i < layer.size(); ++i) lg.ord[layer[i]] = i;
}

} // namespace

std::uint64_t count_layer_crossings(const LayeredGraph& lg, std::size_t upper_layer) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> scratch;
    return count_between(lg, upper_layer, scratch);
}

std::uint64_t count_layer_crossings(const LayeredGraph& lg) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> scratch;
    std::uint64_t total = 0;
    for (std::size_t l = 0; l + 1 < lg.layers.size(); ++l) total += count_between(lg, l, scratch);
    return total;
}

LayeredGraph minimize_crossings(LayeredGraph lg, CrossingStats* stats) {
    presort(lg);
    std::uint64_t best_count = count_layer_crossings(lg);
    CrossingStats local;
    local.presorted = best_count;
    auto best_layers = lg.layers;

    int stale = 0;
    for (int sweep = 0; sweep < kMaxSweeps && best_count > 0 && stale < 2; ++sweep) {
        const bool downward = sweep % 2 == 0;
        if (downward) {
            for (std::size_t l = 1; l < lg.layers.size(); ++l) sweep_layer(lg, l, true);
        } else {
            for (std::size_t l = lg.layers.size() - 1; l-- > 0;) sweep_layer(lg, l, false);
        }
        ++local.sweeps;
        const auto count = count_layer_crossings(lg);
        if (count < best_count) {
            best_count = count;
            best_layers = lg.layers;
            stale = 0;
        } else {
            ++stale;
        }
    }
    lg.layers = std::move(best_layers);
    lg.renumber();
    local.after_sweeps = best_count;

    // Back dummies only, one downward pass against everything else held fixed.
    auto before = lg.layers;
    for (std::size_t l = 1; l < lg.layers.size(); ++l) {
        auto& layer = lg.layers[l];
        const Groups g = groups_of(lg, layer);
        barycenter_sort(lg, layer, 0, g.back_end, lg.up);
        for (std::uint32_t i = 0; i < layer.size(); ++i) lg.ord[layer[i]] = i;
    }
    const auto count = count_layer_crossings(lg);
    if (count > best_count) {
        lg.layers = std::move(before);
        lg.renumber();
    } else {
        best_count = count;
    }
    local.final = best_count;
    if (stats) *stats = local;
    return lg;
}

} // namespace veil::layout
