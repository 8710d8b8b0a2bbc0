#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace veil::cfg {

struct NodeId {
    std::uint32_t value = 0;

    auto operator<=>(const NodeId&) const = default;
};

struct EdgeId {
    std::uint32_t value = 0;

    auto operator<=>(const EdgeId&) const = default;
};

struct Size {
    double width = 0.0;
    double height = 0.0;

    bool operator==(const Size&) const = default;
};

struct Node {
    std::string name;
    std::optional<std::string> label;
    std::optional<Size> size;
    bool is_virtual = false;
};

struct Edge {
    NodeId src;
    NodeId dst;

    bool operator==(const Edge&) const = default;
};

/// Directed graph of basic blocks with a designated entry.
///
/// Node and edge ids are dense indices in insertion order. The edge list order
/// is the tie-breaking order for every traversal downstream, so ingestion must
/// be deterministic. Parallel edges are collapsed on insertion.
class CfgGraph {
public:
    CfgGraph() = default;

    /// Returns the existing id if a node with this name is already present.
    NodeId add_node(std::string_view name);
    NodeId add_node(std::string_view name, std::optional<std::string> label,
                    std::optional<Size> size);

    /// Adds src->dst unless an identical edge exists; returns the id of the
    /// edge that represents it either way.
    EdgeId add_edge(NodeId src, NodeId dst);

    std::optional<NodeId> find(std::string_view name) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const Node& node(NodeId id) const { return nodes_[id.value]; }
    Node& node(NodeId id) { return nodes_[id.value]; }
    const Edge& edge(EdgeId id) const { return edges_[id.value]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const EdgeId> out_edges(NodeId id) const { return out_[id.value]; }
    std::span<const EdgeId> in_edges(NodeId id) const { return in_[id.value]; }

    std::size_t out_degree(NodeId id) const { return out_[id.value].size(); }
    std::size_t in_degree(NodeId id) const { return in_[id.value].size(); }

    NodeId entry() const { return entry_; }
    void set_entry(NodeId id) { entry_ = id; }

    std::optional<NodeId> virtual_sink() const { return virtual_sink_; }
    void set_virtual_sink(NodeId id) {
        virtual_sink_ = id;
        nodes_[id.value].is_virtual = true;
    }

    /// Nodes with out-degree zero, in id order.
    std::vector<NodeId> sinks() const;

    /// The single sink, or nullopt when there are zero or several.
    std::optional<NodeId> unique_sink() const;

    bool operator==(const CfgGraph& other) const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
    std::unordered_map<std::string, NodeId> by_name_;
    NodeId entry_{};
    std::optional<NodeId> virtual_sink_;
};

/// Connects every sink to a fresh virtual sink when there is more than one.
/// Throws PreconditionError if the graph has no sink at all.
CfgGraph ensure_single_sink(CfgGraph g);

/// Name used for the node created by ensure_single_sink.
inline constexpr std::string_view kVirtualSinkName = "__virtual_sink__";

} // namespace veil::cfg

template <>
struct std::hash<veil::cfg::NodeId> {
    std::size_t operator()(veil::cfg::NodeId id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
