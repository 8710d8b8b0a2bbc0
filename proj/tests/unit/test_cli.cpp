#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "veil/cfg/generator.hpp"
#include "veil/cfg/io.hpp"
#include "veil/cli/cli.hpp"
#include "veil/layout/layout_json.hpp"
#include "veil/metrics/metrics.hpp"

using namespace veil;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = VEIL_FIXTURES;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run veil_cmd(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Scratch : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("veil_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    fs::path dir_;
};

bool single_line_diagnostic(const std::string& err) {
    return err.rfind("veil: error: ", 0) == 0 && std::count(err.begin(), err.end(), '\n') == 1;
}

} // namespace

TEST_F(Scratch, LayoutDotToJson) {
    const auto r = veil_cmd({"layout", (kFixtures / "loop.dot").string(), "--mode", "grouped", "-o", path("loop.json")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto l = layout::parse_layout_json(slurp(path("loop.json")));
    EXPECT_EQ(l.nodes.size(), 4u);
    EXPECT_EQ(l.config.mode, layout::Mode::Grouped);
}

TEST(Cli, LayoutToStdoutAndSvg) {
    const auto json = veil_cmd({"layout", (kFixtures / "cfg_seed1.json").string()});
    ASSERT_EQ(json.code, 0) << json.err;
    EXPECT_NO_THROW((void)layout::parse_layout_json(json.out));
    const auto svg = veil_cmd({"layout", (kFixtures / "cfg_seed1.json").string(), "--format", "svg"});
    ASSERT_EQ(svg.code, 0);
    EXPECT_EQ(svg.out.rfind("<svg", 0), 0u);
    EXPECT_EQ(svg.out, veil_cmd({"layout", (kFixtures / "cfg_seed1.json").string(), "--format", "svg"}).out);
}

TEST_F(Scratch, MalformedDotIsParseError) {
    write("bad.dot", "digraph g {\n  a -> b;\n  c -> ;\n}\n");
    const auto r = veil_cmd({"layout", path("bad.dot")});
    EXPECT_EQ(r.code, cli::kExitParse);
    EXPECT_TRUE(single_line_diagnostic(r.err)) << r.err;
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, SpacingBelowNodeWidthIsPrecondition) {
    const auto r = veil_cmd({"layout", (kFixtures / "loop.dot").string(), "--dx", "10"});
    EXPECT_EQ(r.code, cli::kExitPrecondition);
    EXPECT_TRUE(single_line_diagnostic(r.err)) << r.err;
    EXPECT_NE(r.err.find("dx"), std::string::npos);
}

TEST(Cli, MissingInputIsIoError) {
    const auto r = veil_cmd({"layout", "/nonexistent/x.dot"});
    EXPECT_EQ(r.code, cli::kExitIo);
    EXPECT_TRUE(single_line_diagnostic(r.err));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(veil_cmd({}).code, cli::kExitParse);
    EXPECT_EQ(veil_cmd({"frobnicate"}).code, cli::kExitParse);
    EXPECT_EQ(veil_cmd({"layout", "x.dot", "--mode", "spiral"}).code, cli::kExitParse);
    const auto depth = veil_cmd({"generate", "--depth", "0"});
    EXPECT_EQ(depth.code, cli::kExitParse);
    EXPECT_TRUE(single_line_diagnostic(depth.err));
    EXPECT_EQ(veil_cmd({"--help"}).code, 0);
    EXPECT_EQ(veil_cmd({"layout", "--help"}).code, 0);
}

TEST(Cli, SpacingFromEnvironment) {
    ::setenv("VEIL_DX", "150", 1);
    const auto r = veil_cmd({"layout", (kFixtures / "loop.dot").string()});
    ::unsetenv("VEIL_DX");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(layout::parse_layout_json(r.out).config.dx, 150);
    ::setenv("VEIL_DY", "abc", 1);
    EXPECT_EQ(veil_cmd({"layout", (kFixtures / "loop.dot").string()}).code, cli::kExitParse);
    ::unsetenv("VEIL_DY");
}

TEST_F(Scratch, RenderValidatesSchema) {
    ASSERT_EQ(veil_cmd({"layout", (kFixtures / "loop.dot").string(), "-o", path("l.json")}).code, 0);
    const auto svg = veil_cmd({"render", path("l.json")});
    ASSERT_EQ(svg.code, 0);
    std::size_t backs = 0;
    for (auto p = svg.out.find("edge back"); p != std::string::npos; p = svg.out.find("edge back", p + 1)) ++backs;
    EXPECT_EQ(backs, 1u);
    write("broken.json", R"({"config":{"dx":120,"dy":90,"mode":"grouped"},"nodes":[],"edges":[{"src":"a"}]})");
    const auto bad = veil_cmd({"render", path("broken.json")});
    EXPECT_EQ(bad.code, cli::kExitParse);
    EXPECT_TRUE(single_line_diagnostic(bad.err));
}

TEST_F(Scratch, MetricsOnLayoutCfgAndImport) {
    ASSERT_EQ(veil_cmd({"layout", (kFixtures / "cfg_seed1.json").string(), "-o", path("l.json")}).code, 0);
    const auto r = veil_cmd({"metrics", path("l.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = metrics::parse_metrics_json(r.out);
    EXPECT_EQ(report.happens_before, 1.0);
    EXPECT_FALSE(report.layout_time_ms.has_value());

    const auto direct = veil_cmd({"metrics", (kFixtures / "cfg_seed1.json").string()});
    ASSERT_EQ(direct.code, 0) << direct.err;
    EXPECT_TRUE(metrics::parse_metrics_json(direct.out).layout_time_ms.has_value());

    const auto imported = veil_cmd({"metrics", (kFixtures / "loop.plain").string()});
    ASSERT_EQ(imported.code, 0) << imported.err;
    EXPECT_NE(imported.out.find("\"ranks\": \"derived\""), std::string::npos);

    const auto table = veil_cmd({"metrics", path("l.json"), "--format", "metrics-table"});
    ASSERT_EQ(table.code, 0);
    EXPECT_EQ(std::count(table.out.begin(), table.out.end(), '\n'), 16);
}

TEST_F(Scratch, GenerateSeedOneMatchesCommittedFixture) {
    const auto r = veil_cmd({"generate", "--seed", "1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, slurp(kFixtures / "cfg_seed1.json"));
}

TEST_F(Scratch, GenerateCount) {
    const auto r = veil_cmd({"generate", "--count", "100", "-o", path("corpus")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(path("corpus"))) {
        (void)e;
        ++files;
    }
    EXPECT_EQ(files, 100u);
    EXPECT_EQ(slurp(path("corpus/cfg_0001.json")), slurp(kFixtures / "cfg_seed1.json"));
    EXPECT_EQ(slurp(path("corpus/cfg_0100.json")), cfg::to_json(cfg::generate_structured_cfg(100, 4, 3)));
}

TEST_F(Scratch, CompareTables) {
    ASSERT_EQ(veil_cmd({"layout", (kFixtures / "loop.dot").string(), "-o", path("g.json")}).code, 0);
    ASSERT_EQ(veil_cmd({"layout", (kFixtures / "loop.dot").string(), "--mode", "indent", "-o", path("i.json")}).code, 0);
    const auto same = veil_cmd({"compare", path("g.json"), path("g.json")});
    ASSERT_EQ(same.code, 0) << same.err;
    EXPECT_EQ(same.out.find("-0."), std::string::npos);
    EXPECT_EQ(same.out.find("+1"), std::string::npos);

    const auto three = veil_cmd({"compare", path("g.json"), path("i.json"), (kFixtures / "loop.plain").string()});
    ASSERT_EQ(three.code, 0) << three.err;
    const auto header = three.out.substr(0, three.out.find('\n'));
    EXPECT_NE(header.find("g.json"), std::string::npos);
    EXPECT_NE(header.find("i.json"), std::string::npos);
    EXPECT_NE(header.find("loop.plain"), std::string::npos);
    EXPECT_EQ(std::count(three.out.begin(), three.out.end(), '\n'), 15);

    write("other.dot", "digraph g { a -> b; }");
    ASSERT_EQ(veil_cmd({"layout", path("other.dot"), "-o", path("o.json")}).code, 0);
    const auto mismatch = veil_cmd({"compare", path("g.json"), path("o.json")});
    EXPECT_EQ(mismatch.code, cli::kExitPrecondition);
    EXPECT_TRUE(single_line_diagnostic(mismatch.err));
    EXPECT_EQ(veil_cmd({"compare", path("g.json")}).code, cli::kExitParse);
}

TEST_F(Scratch, UnwritableOutputIsIoError) {
    const auto r = veil_cmd({"layout", (kFixtures / "loop.dot").string(), "-o", path("missing/dir/out.json")});
    EXPECT_EQ(r.code, cli::kExitIo);
}
