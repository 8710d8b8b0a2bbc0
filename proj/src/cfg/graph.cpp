#include "veil/cfg/graph.hpp"

#include <algorithm>

#include "veil/errors.hpp"

namespace veil::cfg {

NodeId CfgGraph::add_node(std::string_view name) {
    return add_node(name, std::nullopt, std::nullopt);
}

NodeId CfgGraph::add_node(std::string_view name, std::optional<std::string> label,
                          std::optional<Size> size) {
    if (auto existing = find(name)) {
        return *existing;
    }
    const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
    nodes_.push_back(Node{std::string(name), std::move(label), size, false});
    out_.emplace_back();
    in_.emplace_back();
    by_name_.emplace(std::string(name), id);
    return id;
}

EdgeId CfgGraph::add_edge(NodeId src, NodeId dst) {
    for (EdgeId e : out_[src.value]) {
        if (edges_[e.value].dst == dst) {
            return e;
        }
    }
    const EdgeId id{static_cast<std::uint32_t>(edges_.size())};
    edges_.push_back(Edge{src, dst});
    out_[src.value].push_back(id);
    in_[dst.value].push_back(id);
    return id;
}

std::optional<NodeId> CfgGraph::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<NodeId> CfgGraph::sinks() const {
    std::vector<NodeId> result;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        if (out_[i].empty()) {
            result.push_back(NodeId{i});
        }
    }
    return result;
}

std::optional<NodeId> CfgGraph::unique_sink() const {
    auto s = sinks();
    if (s.size() != 1) {
        return std::nullopt;
    }
    return s.front();
}

bool CfgGraph::operator==(const CfgGraph& other) const {
    if (nodes_.size() != other.nodes_.size() || edges_ != other.edges_ ||
        entry_ != other.entry_ || virtual_sink_ != other.virtual_sink_) {
        return false;
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& a = nodes_[i];
        const auto& b = other.nodes_[i];
        if (a.name != b.name || a.label != b.label || a.size != b.size ||
            a.is_virtual != b.is_virtual) {
            return false;
        }
    }
    return true;
}

CfgGraph ensure_single_sink(CfgGraph g) {
    if (g.node_count() == 0) {
        throw PreconditionError("graph has no nodes");
    }
    auto sinks = g.sinks();
    if (sinks.empty()) {
        throw PreconditionError(
            "graph has no sink node; a CFG requires at least one node without successors");
    }
    if (sinks.size() == 1) {
        return g;
    }
    std::string name(kVirtualSinkName);
    while (g.find(name)) {
        name += "_";
    }
    const NodeId vs = g.add_node(name, std::nullopt, Size{0.0, 0.0});
    g.set_virtual_sink(vs);
    for (NodeId s : sinks) {
        g.add_edge(s, vs);
    }
    return g;
}

} // namespace veil::cfg
