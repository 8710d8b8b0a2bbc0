#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "veil/cfg/graph.hpp"

namespace veil::cfg {

/// Parses the digraph subset of DOT: node statements, (chained) edge
/// statements, `label` attributes. Ports on node references are dropped and
/// every other attribute is ignored, so LLVM `-dot-cfg` output loads as-is.
///
/// The entry is `entry_override` when given, otherwise the unique node without
/// incoming edges (self-loops do not count). Throws ParseError.
CfgGraph parse_dot(std::string_view text,
                   const std::optional<std::string>& entry_override = std::nullopt);

/// Parses `{"entry": .., "nodes": [{id, label?, width?, height?}], "edges": [{src, dst}]}`.
/// Throws ParseError.
CfgGraph parse_json(std::string_view text);

/// Canonical CFG JSON (fixed key order, two-space indent, trailing newline).
/// A virtual sink, if present, is not written.
std::string to_json(const CfgGraph& g);

} // namespace veil::cfg
