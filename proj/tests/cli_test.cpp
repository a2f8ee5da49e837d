// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <gtest/gtest.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdlib>

#include <sys/wait.h>

namespace chamberscope {
namespace {

namespace fs = std::filesystem;
using test::TempDir;

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run cli(const TempDir& dir, const std::string& args, const std::string& env = {}) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const auto command =
        fmt::format("{} '{}' {} >'{}' 2>'{}'", env, CHAMBERSCOPE_CLI_PATH, args, out.string(), err.string());
    const int raw = std::system(command.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, test::read_file(out), test::read_file(err)};
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

TEST(Cli, HelpDocumentsSubcommandsAndDefaults) {
    TempDir dir;
    auto run = cli(dir, "--help");
    EXPECT_EQ(run.status, 0);
    for (const auto* sub : {"ingest", "score", "analyze", "report", "synth"})
        EXPECT_NE(run.out.find(sub), std::string::npos) << sub;
    run = cli(dir, "analyze --help");
    EXPECT_EQ(run.status, 0);
    EXPECT_NE(run.out.find("0.95"), std::string::npos);
    EXPECT_NE(run.out.find("10000"), std::string::npos);
    EXPECT_NE(run.out.find("CHAMBERSCOPE_SEED"), std::string::npos);
}

TEST(Cli, UsageErrorsExitOne) {
    TempDir dir;
    EXPECT_EQ(cli(dir, "").status, 1);
    EXPECT_EQ(cli(dir, "analyze --bogus").status, 1);
    EXPECT_EQ(cli(dir, "analyze").status, 1);  // no corpus given
    EXPECT_EQ(cli(dir, "analyze --corpus x --threshold 0.4").status, 1);
    EXPECT_EQ(cli(dir, "synth --planted nnnx --out " + quoted(dir / "s")).status, 1);
}

TEST(Cli, MissingInputExitsTwo) {
    TempDir dir;
    const auto run = cli(dir, "analyze --corpus " + quoted(dir / "absent"));
    EXPECT_EQ(run.status, 2);
    EXPECT_NE(run.err.find("ingest"), std::string::npos) << run.err;
}

TEST(Cli, SynthAnalyzeReport) {
    TempDir dir;
    ASSERT_EQ(cli(dir, "-q synth --users 30 --max-comments 60 --out " + quoted(dir / "corpus")).status, 0);
    auto run = cli(dir, "analyze --replicates 500 --corpus " + quoted(dir / "corpus") + " --out " + quoted(dir / "out"));
    ASSERT_EQ(run.status, 0) << run.err;
    EXPECT_NE(run.out.find("nynny"), std::string::npos);
    EXPECT_NE(run.err.find("[baseline]"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "out" / "analysis.json"));

    run = cli(dir, "report --replicates 500 --scored " + quoted(dir / "out" / "scored_users.csv") + " --out " +
                       quoted(dir / "report"));
    ASSERT_EQ(run.status, 0) << run.err;
    EXPECT_EQ(test::read_file(dir / "report" / "analysis.json"), test::read_file(dir / "out" / "analysis.json"));

    run = cli(dir, "-q analyze --manifest " + quoted(dir / "out" / "manifest.json") + " --out " + quoted(dir / "re"));
    ASSERT_EQ(run.status, 0) << run.err;
    EXPECT_EQ(test::read_file(dir / "re" / "analysis.json"), test::read_file(dir / "out" / "analysis.json"));
}

TEST(Cli, IngestPrintsReport) {
    TempDir dir;
    test::CorpusFiles files;
    files.page("P1", "science").likes("u", "UNKNOWN", 1).comments("u", "P1", 3);
    files.write(dir / "corpus");
    const auto run = cli(dir, "ingest --corpus " + quoted(dir / "corpus"));
    ASSERT_EQ(run.status, 0) << run.err;
    const auto report = nlohmann::json::parse(run.out);
    EXPECT_EQ(report["likes"]["rejected"], 1);
    EXPECT_EQ(report["comments"]["accepted"], 3);
}

TEST(Cli, EmptyChamberExitsThree) {
    TempDir dir;
    test::CorpusFiles files;
    files.page("S", "science").comments("a", "S", 60).likes("a", "S", 5);
    files.write(dir / "corpus");
    const auto run = cli(dir, "analyze --corpus " + quoted(dir / "corpus") + " --out " + quoted(dir / "out"));
    EXPECT_EQ(run.status, 3);
    EXPECT_NE(run.err.find("stats"), std::string::npos) << run.err;
}

TEST(Cli, EnvironmentSuppliesDefaults) {
    TempDir dir;
    ASSERT_EQ(cli(dir, "-q synth --users 12 --max-comments 55 --out " + quoted(dir / "corpus")).status, 0);
    const auto run = cli(dir, "-q analyze --out " + quoted(dir / "out"),
                         "CHAMBERSCOPE_CORPUS=" + quoted(dir / "corpus") + " CHAMBERSCOPE_REPLICATES=77");
    ASSERT_EQ(run.status, 0) << run.err;
    const auto manifest = nlohmann::json::parse(test::read_file(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest["config"]["mantel_replicates"], 77);
}

TEST(Cli, UnreachablePlantedModelIsConfigError) {
    TempDir dir;
    std::string body = "feature,E,S,A,C,O\n";
    for (const auto* f : {"ap", "cm", "em", "el", "im", "np", "ne", "nb", "pa", "pe", "pp", "qm", "sl", "sr", "sw",
                          "wc", "we", "yu"})
        body += std::string(f) + ",1,1,1,1," + (std::string(f) == "wc" ? "1" : "0") + "\n";
    test::write_file(dir / "signs.csv", body);
    const auto run = cli(dir, "synth --users 5 --planted yyyyn --signs " + quoted(dir / "signs.csv") + " --out " +
                                  quoted(dir / "s"));
    EXPECT_EQ(run.status, 1) << run.err;
}

}  // namespace
}  // namespace chamberscope
