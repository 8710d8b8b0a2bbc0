#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "graphs.hpp"
#include "oracles.hpp"
#include "veil/cfg/analysis.hpp"
#include "veil/cfg/generator.hpp"
#include "veil/cfg/io.hpp"
#include "veil/errors.hpp"

using namespace veil;
using namespace veil::cfg;
using veil::test::id;
using veil::test::make_graph;
using namespace veil::test;

namespace {

EdgeKind kind_of(const CfgGraph& g, const EdgeClassification& c, const std::string& s,
                 const std::string& d) {
    for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(EdgeId{e});
        if (g.node(edge.src).name == s && g.node(edge.dst).name == d) return c.kind(EdgeId{e});
    }
    ADD_FAILURE() << "no edge " << s << "->" << d;
    return EdgeKind::Tree;
}

/// Recursive DFS written from the textbook definition: an edge is Back when
/// its target is still on the stack, Forward when the target was discovered
/// later and already finished, Cross otherwise.
std::vector<EdgeKind> replay_dfs(const CfgGraph& g) {
    const auto n = g.node_count();
    std::vector<int> disc(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<EdgeKind> out(g.edge_count(), EdgeKind::Tree);
    int clock = 0;
    std::function<void(NodeId)> visit = [&](NodeId u) {
        disc[u.value] = clock++;
        on_stack[u.value] = true;
        for (EdgeId e : g.out_edges(u)) {
            const NodeId v = g.edge(e).dst;
            if (disc[v.value] < 0) {
                out[e.value] = EdgeKind::Tree;
                visit(v);
            } else if (on_stack[v.value]) {
                out[e.value] = EdgeKind::Back;
            } else if (disc[v.value] > disc[u.value]) {
                out[e.value] = EdgeKind::Forward;
            } else {
                out[e.value] = EdgeKind::Cross;
            }
        }
        on_stack[u.value] = false;
    };
    visit(g.entry());
    for (std::uint32_t i = 0; i < n; ++i) {
        if (disc[i] < 0) visit(NodeId{i});
    }
    return out;
}

bool acyclic_without_back(const CfgGraph& g, const EdgeClassification& c) {
    std::vector<int> indeg(g.node_count(), 0);
    for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
        if (!c.is_back(EdgeId{e})) ++indeg[g.edge(EdgeId{e}).dst.value];
    }
    std::vector<NodeId> ready;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        if (indeg[i] == 0) ready.push_back(NodeId{i});
    }
    std::size_t done = 0;
    while (!ready.empty()) {
        const NodeId u = ready.back();
        ready.pop_back();
        ++done;
        for (EdgeId e : g.out_edges(u)) {
            if (!c.is_back(e) && --indeg[g.edge(e).dst.value] == 0) ready.push_back(g.edge(e).dst);
        }
    }
    return done == g.node_count();
}

} // namespace

// Ingestion

TEST(ParseDot, SingleEdge) {
    const auto g = parse_dot("digraph g { a -> b; }");
    EXPECT_EQ(g.node_count(), 2u);
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.node(g.entry()).name, "a");
}

TEST(ParseDot, SelfLoopOnly) {
    const auto g = parse_dot("digraph g { a -> a; }");
    EXPECT_EQ(g.node_count(), 1u);
    ASSERT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.edge(EdgeId{0}).src, g.edge(EdgeId{0}).dst);
    EXPECT_EQ(g.node(g.entry()).name, "a");
}

TEST(ParseDot, AmbiguousEntryListsCandidates) {
    try {
        (void)parse_dot("digraph g { a -> b; c -> b; }");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("a"), std::string::npos);
        EXPECT_NE(msg.find("c"), std::string::npos);
    }
    const auto g = parse_dot("digraph g { a -> b; c -> b; }", std::string("c"));
    EXPECT_EQ(g.node(g.entry()).name, "c");
}

TEST(ParseDot, ChainsLabelsAndIgnoredAttributes) {
    const auto g = parse_dot(R"(digraph "f" {
        node [shape=record];
        a [label="entry:\l x = 1", color=red];
        a -> b -> c [style=dashed];
        b:s0 -> d;
        a -> b;
    })");
    EXPECT_EQ(g.node_count(), 4u);
    EXPECT_EQ(g.edge_count(), 3u); // duplicate a->b collapsed
    EXPECT_TRUE(g.node(id(g, "a")).label.has_value());
    EXPECT_EQ(g.node(id(g, "b")).name, "b");
}

TEST(ParseDot, RejectsUndirectedGraph) {
    EXPECT_THROW((void)parse_dot("graph g { a -- b; }"), ParseError);
}

TEST(ParseDot, SyntaxErrorReportsPosition) {
    try {
        (void)parse_dot("digraph g {\n a -> ;\n}");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(ParseJson, TwoNodeChain) {
    const auto g = parse_json(
        R"({"entry":"a","nodes":[{"id":"a"},{"id":"b"}],"edges":[{"src":"a","dst":"b"}]})");
    EXPECT_EQ(g.node_count(), 2u);
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.node(g.entry()).name, "a");
}

TEST(ParseJson, UnknownEndpointNamed) {
    try {
        (void)parse_json(R"({"entry":"a","nodes":[{"id":"a"}],"edges":[{"src":"a","dst":"z"}]})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("'z'"), std::string::npos);
    }
}

TEST(ParseJson, Rejections) {
    EXPECT_THROW((void)parse_json(R"({"entry":"a","nodes":[],"edges":[]})"), ParseError);
    EXPECT_THROW((void)parse_json(R"({"nodes":[{"id":"a"}],"edges":[]})"), ParseError);
    EXPECT_THROW((void)parse_json(R"({"entry":"a","nodes":[{"id":"a"},{"id":"a"}]})"), ParseError);
    EXPECT_THROW((void)parse_json("{not json"), ParseError);
}

TEST(ParseJson, RoundTripIsCanonical) {
    const auto g = generate_structured_cfg(7, 4, 3);
    const auto text = to_json(g);
    const auto back = parse_json(text);
    EXPECT_TRUE(back == g);
    EXPECT_EQ(to_json(back), text);
}

TEST(ParseJson, SizesKept) {
    const auto g = parse_json(
        R"({"entry":"a","nodes":[{"id":"a","width":30,"height":20,"label":"x"}],"edges":[]})");
    ASSERT_TRUE(g.node(NodeId{0}).size.has_value());
    EXPECT_EQ(*g.node(NodeId{0}).size, (Size{30, 20}));
    EXPECT_EQ(*g.node(NodeId{0}).label, "x");
}

// Sink normalization

TEST(EnsureSingleSink, AddsVirtualSink) {
    const auto g = ensure_single_sink(make_graph({{"a", "x"}, {"a", "y"}}));
    ASSERT_TRUE(g.virtual_sink().has_value());
    const NodeId s = *g.virtual_sink();
    EXPECT_TRUE(g.node(s).is_virtual);
    EXPECT_EQ(g.in_degree(s), 2u);
    EXPECT_EQ(g.unique_sink(), s);
    std::set<std::string> preds;
    for (EdgeId e : g.in_edges(s)) preds.insert(g.node(g.edge(e).src).name);
    EXPECT_EQ(preds, (std::set<std::string>{"x", "y"}));
}

TEST(EnsureSingleSink, SingleSinkUnchangedAndIdempotent) {
    const auto chain = make_graph({{"a", "b"}});
    EXPECT_TRUE(ensure_single_sink(chain) == chain);
    const auto once = ensure_single_sink(make_graph({{"a", "x"}, {"a", "y"}}));
    EXPECT_TRUE(ensure_single_sink(once) == once);
}

TEST(EnsureSingleSink, PureCycleRejected) {
    EXPECT_THROW((void)ensure_single_sink(make_graph({{"a", "b"}, {"b", "a"}})), PreconditionError);
}

// Edge classification

TEST(ClassifyEdges, SelfLoopIsBack) {
    const auto g = make_graph({{"a", "a"}, {"a", "b"}});
    EXPECT_EQ(kind_of(g, classify_edges(g), "a", "a"), EdgeKind::Back);
}

TEST(ClassifyEdges, InvertedLoopHasOneBackEdge) {
    const auto g = test::inverted_loop();
    const auto c = classify_edges(g);
    for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
        const auto& edge = g.edge(EdgeId{e});
        const bool closing = g.node(edge.src).name == "5" && g.node(edge.dst).name == "2";
        EXPECT_EQ(c.is_back(EdgeId{e}), closing);
    }
}

TEST(ClassifyEdges, DiamondMatchesReplay) {
    const auto g = test::diamond();
    const auto c = classify_edges(g);
    EXPECT_EQ(kind_of(g, c, "a", "b"), EdgeKind::Tree);
    EXPECT_EQ(kind_of(g, c, "a", "c"), EdgeKind::Tree);
    EXPECT_EQ(kind_of(g, c, "b", "d"), EdgeKind::Tree);
    EXPECT_EQ(kind_of(g, c, "c", "d"), EdgeKind::Cross);
    EXPECT_EQ(c.class_of, replay_dfs(g));
}

TEST(ClassifyEdges, UnreachableNodesReported) {
    const auto g = make_graph({{"a", "b"}, {"z", "b"}, {"z", "z"}});
    const auto c = classify_edges(g);
    ASSERT_EQ(c.unreachable.size(), 1u);
    EXPECT_EQ(g.node(c.unreachable.front()).name, "z");
    EXPECT_FALSE(c.reachable(id(g, "z")));
    EXPECT_EQ(kind_of(g, c, "z", "z"), EdgeKind::Back);
    EXPECT_EQ(kind_of(g, c, "z", "b"), EdgeKind::Cross);
}

TEST(ClassifyEdges, RandomDigraphsMatchReplayAndAreAcyclicWithoutBack) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 12);
        const auto g = test::random_digraph(rng, n, 0.05 + 0.4 * ((trial % 7) / 7.0));
        const auto c = classify_edges(g);
        ASSERT_EQ(c.class_of.size(), g.edge_count());
        EXPECT_EQ(c.class_of, replay_dfs(g)) << "trial " << trial;
        EXPECT_TRUE(acyclic_without_back(g, c)) << "trial " << trial;
        EXPECT_TRUE(classify_edges(g) == c);
    }
}

// Dominators

TEST(Dominators, Chain) {
    const auto g = make_graph({{"a", "b"}, {"b", "c"}});
    const auto d = compute_dominators(g);
    EXPECT_EQ(d.idom(id(g, "b")), id(g, "a"));
    EXPECT_EQ(d.idom(id(g, "c")), id(g, "b"));
    EXPECT_EQ(d.idom(id(g, "a")), id(g, "a"));
    EXPECT_EQ(d.ipdom(id(g, "a")), id(g, "b"));
    EXPECT_EQ(d.ipdom(id(g, "b")), id(g, "c"));
}

TEST(Dominators, InvertedLoopConditionPostDominatesBody) {
    const auto g = test::inverted_loop();
    const auto d = compute_dominators(g);
    for (const char* n : {"2", "3", "4"}) EXPECT_TRUE(d.post_dominates(id(g, "5"), id(g, n))) << n;
    EXPECT_EQ(d.ipdom(id(g, "2")), id(g, "5"));
    EXPECT_EQ(d.dom_subtree_size(id(g, "2")), 5u);
    EXPECT_EQ(d.dom_subtree_size(id(g, "5")), 2u);
}

TEST(Dominators, PostDominatorsNeedSingleSink) {
    EXPECT_THROW((void)post_dominator_tree(make_graph({{"a", "x"}, {"a", "y"}})), PreconditionError);
}

TEST(Dominators, SubtreeSizesSumOverChildren) {
    const auto g = ensure_single_sink(generate_structured_cfg(5, 5, 3));
    const auto d = compute_dominators(g);
    std::vector<std::uint32_t> sum(g.node_count(), 1);
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        const NodeId v{i};
        if (v != g.entry()) sum[d.idom(v)->value] += d.dom_subtree_size(v);
    }
    for (std::uint32_t i = 0; i < g.node_count(); ++i) EXPECT_EQ(d.dom_subtree_size(NodeId{i}), sum[i]);
}

TEST(Dominators, MatchPathEnumerationOnRandomDigraphs) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 12);
        auto g = test::random_digraph(rng, n, 0.12 + 0.2 * ((trial % 5) / 5.0));
        if (g.sinks().empty()) g.add_edge(NodeId{static_cast<std::uint32_t>(n - 1)}, g.add_node("out"));
        g = ensure_single_sink(std::move(g));
        const auto d = compute_dominators(g);
        const auto dom = enumerate_dominators(g, g.entry(), true);
        const auto pdom = enumerate_dominators(g, *g.unique_sink(), false);
        for (std::uint32_t v = 0; v < g.node_count(); ++v) {
            const NodeId node{v};
            EXPECT_EQ(d.idom(node), idom_from_sets(dom, node, g.entry())) << "trial " << trial;
            EXPECT_EQ(d.ipdom(node), idom_from_sets(pdom, node, *g.unique_sink())) << "trial " << trial;
            for (std::uint32_t a = 0; a < g.node_count(); ++a) {
                const bool expected = (dom[v] >> a) & 1u;
                EXPECT_EQ(d.dominates(NodeId{a}, node), expected) << "trial " << trial;
            }
        }
    }
}

// Generator

TEST(Generator, SequenceOfThreeIsChain) {
    GeneratorConfig c;
    c.max_depth = 1;
    c.max_width = 3;
    c.forced = Construct::Sequence;
    const auto g = generate_cfg(c).graph;
    EXPECT_EQ(g.node_count(), 3u);
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_TRUE(g.unique_sink().has_value());
}

TEST(Generator, WhileHasRegularLoopShape) {
    GeneratorConfig c;
    c.max_depth = 1;
    c.max_width = 1;
    c.forced = Construct::While;
    const auto gen = generate_cfg(c);
    const auto& g = gen.graph;
    ASSERT_EQ(gen.loop_edges.size(), 1u);
    const auto back = g.edge(gen.loop_edges.front());
    const NodeId header = back.dst;
    // Header: one predecessor from outside, two successors (body and exit).
    EXPECT_EQ(g.out_degree(header), 2u);
    EXPECT_EQ(g.in_degree(header), 2u);
    const auto d = compute_dominators(ensure_single_sink(g));
    EXPECT_FALSE(d.post_dominates(back.src, header));
    EXPECT_TRUE(d.dominates(header, back.src));
}

TEST(Generator, Deterministic) {
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        EXPECT_EQ(to_json(generate_structured_cfg(seed, 5, 3)), to_json(generate_structured_cfg(seed, 5, 3)));
    }
    EXPECT_THROW((void)generate_structured_cfg(1, 0, 3), PreconditionError);
}

TEST(Generator, BackEdgesAreExactlyLoopClosuresAndReducible) {
    for (auto family : {CorpusFamily::Full, CorpusFamily::SeriesParallel}) {
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            GeneratorConfig c;
            c.seed = seed;
            c.max_depth = 1 + static_cast<int>(seed % 6);
            c.family = family;
            const auto gen = generate_cfg(c);
            const auto cls = classify_edges(gen.graph);
            std::set<EdgeId> expected(gen.loop_edges.begin(), gen.loop_edges.end());
            std::set<EdgeId> actual;
            for (std::uint32_t e = 0; e < gen.graph.edge_count(); ++e) {
                if (cls.is_back(EdgeId{e})) actual.insert(EdgeId{e});
            }
            EXPECT_EQ(actual, expected) << "seed " << seed;
            const auto g = ensure_single_sink(gen.graph);
            const auto d = compute_dominators(g);
            for (EdgeId e : actual) EXPECT_TRUE(d.dominates(g.edge(e).dst, g.edge(e).src));
            EXPECT_TRUE(cls.unreachable.empty());
            if (family == CorpusFamily::SeriesParallel) {
                EXPECT_EQ(gen.early_exits, 0u);
            }
        }
    }
}
