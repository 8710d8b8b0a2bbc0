#include "veil/cfg/generator.hpp"

#include <random>
#include <string>

#include "veil/errors.hpp"

namespace veil::cfg {
namespace {

struct Region {
    NodeId entry;
    NodeId exit;
};

class Builder {
public:
    explicit Builder(const GeneratorConfig& config) : config_(config), rng_(config.seed) {}

    GeneratedCfg run() {
        if (config_.max_depth < 1) throw PreconditionError("max_depth must be at least 1");
        if (config_.max_width < 1) throw PreconditionError("max_width must be at least 1");

        const Construct shape = config_.forced.value_or(Construct::Sequence);
        if (shape == Construct::Sequence && config_.forced) {
            // Exactly max_width top-level statements; the first and last are
            // plain blocks so the entry is a source.
            std::optional<Region> prev;
            for (int i = 0; i < config_.max_width; ++i) {
                const bool edge = i == 0 || i + 1 == config_.max_width;
                Region r = edge ? block("stmt") : statement(1);
                link(prev, r);
            }
        } else {
            const Region entry = block("entry");
            std::optional<Region> prev = entry;
            if (config_.forced) {
                link(prev, construct(*config_.forced, 1));
            } else {
                const int count = uniform(1, config_.max_width);
                for (int i = 0; i < count; ++i) link(prev, statement(1));
                while (out_.graph.node_count() + 1 < config_.min_nodes) {
                    link(prev, statement(1));
                }
            }
            link(prev, block("exit"));
        }
        for (auto [src, dst] : deferred_) out_.graph.add_edge(src, dst);
        out_.graph.set_entry(NodeId{0});
        return std::move(out_);
    }

private:
    void link(std::optional<Region>& prev, Region next) {
        if (prev) out_.graph.add_edge(prev->exit, next.entry);
        prev = next;
    }

    int uniform(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(rng_() % span);
    }

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    NodeId node(const char* role) {
        const auto index = out_.graph.node_count();
        return out_.graph.add_node("bb" + std::to_string(index), std::string(role), std::nullopt);
    }

    Region block(const char* role) {
        const NodeId n = node(role);
        return {n, n};
    }

    bool over_budget() const { return out_.graph.node_count() >= config_.node_budget; }

    Region statement(int depth) {
        if (depth >= config_.max_depth || over_budget()) return block("stmt");
        const double p = unit();
        if (config_.family == CorpusFamily::SeriesParallel) {
            if (p < 0.5) return block("stmt");
            if (p < 0.75) return construct(Construct::IfElse, depth);
            return construct(Construct::While, depth);
        }
        if (p < 0.45) return block("stmt");
        if (p < 0.65) return construct(Construct::IfElse, depth);
        if (p < 0.80) return construct(Construct::While, depth);
        if (p < 0.90) return construct(Construct::DoWhile, depth);
        return construct(Construct::EarlyExit, depth);
    }

    Region sequence(int depth) {
        const int count = uniform(1, config_.max_width);
        Region first = statement(depth);
        Region last = first;
        for (int i = 1; i < count; ++i) {
            Region next = statement(depth);
            out_.graph.add_edge(last.exit, next.entry);
            last = next;
        }
        return {first.entry, last.exit};
    }

    Region construct(Construct kind, int depth) {
        auto& g = out_.graph;
        switch (kind) {
        case Construct::Block:
            return block("stmt");
        case Construct::Sequence:
            return sequence(depth + 1);
        case Construct::IfElse: {
            ++out_.branches;
            const NodeId cond = node("if.cond");
            const Region then_branch = sequence(depth + 1);
            const bool has_else = unit() < 0.7;
            std::optional<Region> else_branch;
            if (has_else) else_branch = sequence(depth + 1);
            const NodeId merge = node("if.merge");
            g.add_edge(cond, then_branch.entry);
            g.add_edge(then_branch.exit, merge);
            if (else_branch) {
                g.add_edge(cond, else_branch->entry);
                g.add_edge(else_branch->exit, merge);
            } else {
                g.add_edge(cond, merge);
            }
            return {cond, merge};
        }
        case Construct::While: {
            ++out_.loops;
            const NodeId header = node("while.header");
            const Region body = sequence(depth + 1);
            g.add_edge(header, body.entry);
            out_.loop_edges.push_back(g.add_edge(body.exit, header));
            return {header, header};
        }
        case Construct::DoWhile: {
            ++out_.loops;
            const Region body = sequence(depth + 1);
            const NodeId cond = node("do.cond");
            g.add_edge(body.exit, cond);
            out_.loop_edges.push_back(g.add_edge(cond, body.entry));
            return {body.entry, cond};
        }
        case Construct::EarlyExit: {
            ++out_.early_exits;
            const NodeId check = node("early.check");
            const NodeId ret = node("early.return");
            // Added last so the fall-through successor comes first.
            deferred_.emplace_back(check, ret);
            return {check, check};
        }
        }
        return block("stmt");
    }

    GeneratorConfig config_;
    std::mt19937_64 rng_;
    GeneratedCfg out_;
    std::vector<std::pair<NodeId, NodeId>> deferred_;
};

} // namespace

GeneratedCfg generate_cfg(const GeneratorConfig& config) { return Builder(config).run(); }

CfgGraph generate_structured_cfg(std::uint64_t seed, int max_depth, int max_width) {
    GeneratorConfig config;
    config.seed = seed;
    config.max_depth = max_depth;
    config.max_width = max_width;
    return generate_cfg(config).graph;
}

} // namespace veil::cfg
