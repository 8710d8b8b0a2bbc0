#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "veil/cfg/graph.hpp"

namespace veil::cfg {

enum class Construct : std::uint8_t { Block, Sequence, IfElse, While, DoWhile, EarlyExit };

enum class CorpusFamily : std::uint8_t {
    Full,          // every construct
    SeriesParallel // sequence, if-else and while only
};

struct GeneratorConfig {
    std::uint64_t seed = 1;
    int max_depth = 4;
    int max_width = 3;
    CorpusFamily family = CorpusFamily::Full;
    /// Shape of the top level. Sequence yields exactly max_width statements;
    /// While/IfElse/DoWhile wrap a single construct between an entry and an
    /// exit block.
    std::optional<Construct> forced;
    /// Keep appending top-level statements until the graph has this many nodes.
    std::size_t min_nodes = 0;
    /// Soft cap after which only plain blocks are generated.
    std::size_t node_budget = 400;
};

struct GeneratedCfg {
    CfgGraph graph;
    /// Loop-closing edges, recorded as each loop is built.
    std::vector<EdgeId> loop_edges;
    std::size_t loops = 0;
    std::size_t branches = 0;
    std::size_t early_exits = 0;
};

/// Deterministic pseudo-random structured (hence reducible) CFG. The same
/// config always yields the same graph.
GeneratedCfg generate_cfg(const GeneratorConfig& config);

/// Throws PreconditionError when max_depth < 1.
CfgGraph generate_structured_cfg(std::uint64_t seed, int max_depth, int max_width);

} // namespace veil::cfg
