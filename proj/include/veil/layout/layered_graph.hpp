#pragma once

#include <cstdint>
#include <vector>

#include "veil/cfg/analysis.hpp"
#include "veil/layout/ranking.hpp"

namespace veil::layout {

enum class SlotKind : std::uint8_t { Real, BackDummy, ForwardDummy };

/// One position in a layer: a real node or a dummy of a normalized edge.
struct Slot {
    SlotKind kind = SlotKind::Real;
    NodeId node{};  // Real only
    EdgeId edge{};  // dummies only
    int rank = 0;

    bool is_dummy() const { return kind != SlotKind::Real; }
};

using SlotIndex = std::uint32_t;

/// Edge segment between two adjacent layers; `upper` sits on rank r, `lower`
/// on r + 1.
struct Segment {
    SlotIndex upper;
    SlotIndex lower;
};

/// Ranks with their ordered slots after edge normalization.
///
/// Edges whose endpoints are more than one rank apart are replaced by chains of
/// dummies, one per intermediate rank; dummies of Back edges are typed
/// separately from those of all other edges. Self-loops, Back edges between
/// adjacent ranks and edges into a virtual sink have no segments: they are
/// routed at coordinate time.
struct LayeredGraph {
    std::vector<Slot> slots;
    std::vector<std::vector<SlotIndex>> layers;
    std::vector<std::uint32_t> ord;            // indexed by SlotIndex
    std::vector<SlotIndex> slot_of_node;       // indexed by NodeId
    std::vector<std::vector<SlotIndex>> chains; // indexed by EdgeId, top to bottom
    std::vector<Segment> segments;
    std::vector<std::vector<SlotIndex>> up;    // neighbors on rank - 1
    std::vector<std::vector<SlotIndex>> down;  // neighbors on rank + 1

    std::size_t layer_count() const { return layers.size(); }

    /// Number of BackDummy slots in a layer.
    std::uint32_t back_dummies(std::size_t layer) const;

    /// Rewrites `ord` from the current layer sequences.
    void renumber();
};

LayeredGraph normalize_edges(const CfgGraph& g, const EdgeClassification& cls,
                             const RankAssignment& ranks);

/// Crossings between segments of two adjacent layers under the current order.
std::uint64_t count_layer_crossings(const LayeredGraph& lg, std::size_t upper_layer);
std::uint64_t count_layer_crossings(const LayeredGraph& lg);

struct CrossingStats {
    std::uint64_t presorted = 0;
    std::uint64_t after_sweeps = 0;
    std::uint64_t final = 0;
    int sweeps = 0;
};

/// Orders each layer [BackDummy..., Real..., ForwardDummy...] (stable), then
/// alternates barycenter sweeps over reals and forward dummies with back
/// dummies pinned, then permutes only the back-dummy prefixes. Never returns
/// an ordering with more crossings than the presorted one.
LayeredGraph minimize_crossings(LayeredGraph lg, CrossingStats* stats = nullptr);

/// Maximum number of barycenter sweeps.
inline constexpr int kMaxSweeps = 8;

} // namespace veil::layout
