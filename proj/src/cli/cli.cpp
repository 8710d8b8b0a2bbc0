#include "veil/cli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "veil/cfg/generator.hpp"
#include "veil/cfg/io.hpp"
#include "veil/errors.hpp"
#include "veil/layout/layout_json.hpp"
#include "veil/layout/pipeline.hpp"
#include "veil/layout/svg.hpp"
#include "veil/metrics/metrics.hpp"

namespace veil::cli {
namespace {

namespace fs = std::filesystem;

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write '" + path + "'");
    file << text;
    if (!file) throw IoError("cannot write '" + path + "'");
}

std::string extension(const std::string& path) {
    return fs::path(path).extension().string();
}

/// Input kinds accepted where a drawing is expected.
enum class Source { Dot, CfgJson, Layout, Plain };

Source detect(const std::string& path, const std::string& text, const std::string& forced) {
    if (forced == "dot") return Source::Dot;
    if (forced == "json" || forced == "cfg-json") return Source::CfgJson;
    if (forced == "layout") return Source::Layout;
    if (forced == "plain") return Source::Plain;
    const auto ext = extension(path);
    if (ext == ".dot" || ext == ".gv") return Source::Dot;
    if (ext == ".plain") return Source::Plain;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        return text.find("\"config\"") != std::string::npos ? Source::Layout : Source::CfgJson;
    }
    if (text.compare(first == std::string::npos ? 0 : first, 5, "graph") == 0 &&
        text.find("digraph") == std::string::npos) {
        return Source::Plain;
    }
    return Source::Dot;
}

cfg::CfgGraph load_cfg(const std::string& path, const std::string& text, Source source,
                       const std::optional<std::string>& entry) {
    if (source == Source::CfgJson) {
        auto g = cfg::parse_json(text);
        if (entry) {
            auto id = g.find(*entry);
            if (!id) throw ParseError("entry '" + *entry + "' is not a node");
            g.set_entry(*id);
        }
        return g;
    }
    if (source == Source::Dot) return cfg::parse_dot(text, entry);
    throw ParseError("'" + path + "' is not a CFG (DOT or CFG JSON)");
}

double env_spacing(const char* name, double fallback) {
    const char* value = std::getenv(name);
    if (!value || !*value) return fallback;
    char* end = nullptr;
    const double v = std::strtod(value, &end);
    if (end == value || *end != '\0' || !(v > 0.0)) {
        throw ParseError(std::string(name) + " must be a positive number");
    }
    return v;
}

struct LayoutOptions {
    std::string input;
    std::string input_format;
    std::optional<std::string> entry;
    double dx = 0.0;
    double dy = 0.0;
    std::string mode = "grouped";
    std::string output;

    layout::LayoutConfig config() const {
        layout::LayoutConfig c;
        c.dx = dx;
        c.dy = dy;
        c.mode = *layout::parse_mode(mode);
        return c;
    }
};

void add_layout_flags(CLI::App* cmd, LayoutOptions& o) {
    cmd->add_option("input", o.input, "DOT or CFG JSON file ('-' for stdin)");
    cmd->add_option("--input-format", o.input_format, "dot or json; by extension when omitted")
        ->check(CLI::IsMember({"dot", "json"}));
    cmd->add_option("--entry", o.entry, "Entry node name");
    cmd->add_option("--dx", o.dx, "Horizontal grid spacing in px")->capture_default_str();
    cmd->add_option("--dy", o.dy, "Vertical rank spacing in px")->capture_default_str();
    cmd->add_option("--mode", o.mode, "grouped or indent")
        ->check(CLI::IsMember({"grouped", "indent"}))
        ->capture_default_str();
    cmd->add_option("-o,--output", o.output, "Output file (stdout when omitted)");
}

struct Drawing {
    layout::Layout layout;
    std::optional<double> elapsed_ms;
};

Drawing load_drawing(const std::string& path, const std::string& forced, const LayoutOptions& lo) {
    const std::string text = read_input(path);
    const Source source = detect(path, text, forced);
    if (source == Source::Layout) return {layout::parse_layout_json(text), std::nullopt};
    if (source == Source::Plain) return {metrics::import_graphviz_plain(text), std::nullopt};
    const auto g = load_cfg(path, text, source, lo.entry);
    const auto start = std::chrono::steady_clock::now();
    auto result = layout::layout(g, lo.config());
    const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
    return {std::move(result), took.count()};
}

// Subcommands.

int cmd_layout(const LayoutOptions& o, const std::string& format, std::ostream& out) {
    const std::string text = read_input(o.input);
    const auto g = load_cfg(o.input, text, detect(o.input, text, o.input_format), o.entry);
    const auto result = layout::layout(g, o.config());
    write_output(o.output, format == "svg" ? layout::render_svg(result) : layout::to_layout_json(result),
                 out);
    return kExitOk;
}

int cmd_render(const std::string& input, const std::string& output, std::ostream& out) {
    const auto l = layout::parse_layout_json(read_input(input));
    write_output(output, layout::render_svg(l), out);
    return kExitOk;
}

struct MetricsOptions {
    std::string input;
    std::string input_format;
    std::string format = "metrics-json";
    double epsilon = 0.5;
    std::optional<double> unit_length;
    std::string output;
};

int cmd_metrics(const MetricsOptions& m, const LayoutOptions& lo, std::ostream& out) {
    const auto drawing = load_drawing(m.input, m.input_format, lo);
    metrics::ReportOptions options;
    options.bend_epsilon = m.epsilon;
    options.unit_length = m.unit_length;
    options.layout_time_ms = drawing.elapsed_ms;
    const auto report = metrics::metrics_report(drawing.layout, options);
    write_output(m.output, m.format == "metrics-table" ? metrics::to_table(report)
                                                       : metrics::to_json(report),
                 out);
    return kExitOk;
}

struct GenerateOptions {
    std::uint64_t seed = 1;
    int depth = 4;
    int width = 3;
    std::string family = "full";
    std::size_t count = 0;
    std::size_t min_nodes = 0;
    std::string output;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
    if (o.depth < 1) throw ParseError("--depth must be at least 1");
    if (o.width < 1) throw ParseError("--width must be at least 1");
    auto make = [&](std::uint64_t seed) {
        cfg::GeneratorConfig c;
        c.seed = seed;
        c.max_depth = o.depth;
        c.max_width = o.width;
        c.family = o.family == "series-parallel" ? cfg::CorpusFamily::SeriesParallel
                                                 : cfg::CorpusFamily::Full;
        c.min_nodes = o.min_nodes;
        if (c.min_nodes > c.node_budget) c.node_budget = c.min_nodes;
        return cfg::to_json(cfg::generate_cfg(c).graph);
    };
    if (o.count == 0) {
        write_output(o.output, make(o.seed), out);
        return kExitOk;
    }
    const fs::path dir = o.output.empty() ? fs::path(".") : fs::path(o.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "'");
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::uint64_t seed = o.seed + i;
        write_output((dir / fmt::format("cfg_{:04}.json", seed)).string(), make(seed), out);
    }
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& input_format,
                const MetricsOptions& m, const LayoutOptions& lo, std::ostream& out) {
    std::vector<std::string> names;
    std::vector<layout::Layout> layouts;
    std::vector<metrics::MetricsReport> reports;
    metrics::ReportOptions options;
    options.bend_epsilon = m.epsilon;
    options.unit_length = m.unit_length;
    for (const auto& path : inputs) {
        auto drawing = load_drawing(path, input_format, lo);
        names.push_back(fs::path(path).filename().string());
        options.layout_time_ms = drawing.elapsed_ms;
        reports.push_back(metrics::metrics_report(drawing.layout, options));
        layouts.push_back(std::move(drawing.layout));
    }
    metrics::require_same_nodes(names, layouts);
    write_output(m.output, metrics::compare_table(names, reports), out);
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Control-flow graph layout and layout metrics", "veil"};
    app.require_subcommand(1);

    LayoutOptions lo;
    std::string layout_format = "layout-json";
    auto* layout_cmd = app.add_subcommand("layout", "Lay out a CFG (DOT or CFG JSON)");
    add_layout_flags(layout_cmd, lo);
    layout_cmd->add_option("--format", layout_format, "layout-json or svg")
        ->check(CLI::IsMember({"layout-json", "svg"}))
        ->capture_default_str();

    std::string render_input;
    std::string render_output;
    auto* render_cmd = app.add_subcommand("render", "Render Layout JSON as SVG");
    render_cmd->add_option("input", render_input, "Layout JSON file ('-' for stdin)");
    render_cmd->add_option("-o,--output", render_output, "Output file (stdout when omitted)");

    MetricsOptions mo;
    LayoutOptions metrics_lo;
    auto* metrics_cmd = app.add_subcommand(
        "metrics", "Measure a drawing (Layout JSON, Graphviz plain, or a CFG laid out first)");
    metrics_cmd->add_option("input", mo.input, "Input file ('-' for stdin)");
    metrics_cmd->add_option("--input-format", mo.input_format, "layout, plain, dot or json")
        ->check(CLI::IsMember({"layout", "plain", "dot", "json"}));
    metrics_cmd->add_option("--format", mo.format, "metrics-json or metrics-table")
        ->check(CLI::IsMember({"metrics-json", "metrics-table"}))
        ->capture_default_str();
    metrics_cmd->add_option("--epsilon", mo.epsilon, "Bend tolerance in px")->capture_default_str();
    metrics_cmd->add_option("--unit-length", mo.unit_length, "Ideal edge length for tension");
    metrics_cmd->add_option("--entry", metrics_lo.entry, "Entry node name (CFG input)");
    metrics_cmd->add_option("--dx", metrics_lo.dx, "Grid spacing (CFG input)");
    metrics_cmd->add_option("--dy", metrics_lo.dy, "Rank spacing (CFG input)");
    metrics_cmd->add_option("--mode", metrics_lo.mode, "grouped or indent (CFG input)")
        ->check(CLI::IsMember({"grouped", "indent"}));
    metrics_cmd->add_option("-o,--output", mo.output, "Output file (stdout when omitted)");

    GenerateOptions go;
    auto* generate_cmd = app.add_subcommand("generate", "Generate structured CFG JSON");
    generate_cmd->add_option("--seed", go.seed, "First seed")->capture_default_str();
    generate_cmd->add_option("--depth", go.depth, "Maximum nesting depth")->capture_default_str();
    generate_cmd->add_option("--width", go.width, "Maximum statements per sequence")
        ->capture_default_str();
    generate_cmd->add_option("--family", go.family, "full or series-parallel")
        ->check(CLI::IsMember({"full", "series-parallel"}))
        ->capture_default_str();
    generate_cmd->add_option("--count", go.count, "Write this many files, seeds seed..seed+count-1");
    generate_cmd->add_option("--min-nodes", go.min_nodes, "Grow the top level to this many nodes");
    generate_cmd->add_option("-o,--output", go.output, "Output file, or directory with --count");

    std::vector<std::string> compare_inputs;
    std::string compare_format;
    MetricsOptions co;
    LayoutOptions compare_lo;
    auto* compare_cmd = app.add_subcommand("compare", "Side-by-side metrics of drawings of one CFG");
    compare_cmd->add_option("inputs", compare_inputs, "Two or more drawings")->required()->expected(2, -1);
    compare_cmd->add_option("--input-format", compare_format, "layout, plain, dot or json")
        ->check(CLI::IsMember({"layout", "plain", "dot", "json"}));
    compare_cmd->add_option("--epsilon", co.epsilon, "Bend tolerance in px")->capture_default_str();
    compare_cmd->add_option("--unit-length", co.unit_length, "Ideal edge length for tension");
    compare_cmd->add_option("-o,--output", co.output, "Output file (stdout when omitted)");

    try {
        const double dx = env_spacing("VEIL_DX", 120.0);
        const double dy = env_spacing("VEIL_DY", 90.0);
        for (auto* o : {&lo, &metrics_lo, &compare_lo}) {
            o->dx = dx;
            o->dy = dy;
        }

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            // Subcommand help requests surface here as well.
            if (e.get_exit_code() == 0) {
                for (auto* sub : app.get_subcommands()) out << sub->help();
                return kExitOk;
            }
            err << "veil: error: " << e.what() << "\n";
            return kExitParse;
        }

        if (*layout_cmd) return cmd_layout(lo, layout_format, out);
        if (*render_cmd) return cmd_render(render_input, render_output, out);
        if (*metrics_cmd) return cmd_metrics(mo, metrics_lo, out);
        if (*generate_cmd) return cmd_generate(go, out);
        if (*compare_cmd) return cmd_compare(compare_inputs, compare_format, co, compare_lo, out);
    } catch (const ParseError& e) {
        err << "veil: error: " << e.what() << "\n";
        return kExitParse;
    } catch (const PreconditionError& e) {
        err << "veil: error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const IoError& e) {
        err << "veil: error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitParse;
}

} // namespace veil::cli
