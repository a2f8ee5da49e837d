// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <chamberscope/corpus.hpp>
#include <chamberscope/error.hpp>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sstream>

namespace chamberscope {
namespace {

using test::CorpusFiles;
using test::TempDir;

LoadResult load(const CorpusFiles& files, const TempDir& dir, const LoadOptions& options = {}) {
    const auto paths = files.write(dir.path());
    return load_corpus(paths.pages, paths.comments, paths.likes, options);
}

TEST(Polarization, StrictlyAboveThreshold) {
    EXPECT_EQ(classify_polarization(96, 4, 0.95), Polarization::science);
    EXPECT_EQ(classify_polarization(95, 5, 0.95), Polarization::unpolarized);
    EXPECT_EQ(classify_polarization(4, 96, 0.95), Polarization::conspiracy);
    EXPECT_EQ(classify_polarization(5, 95, 0.95), Polarization::unpolarized);
    EXPECT_EQ(classify_polarization(0, 0, 0.95), Polarization::unpolarized);
    EXPECT_EQ(classify_polarization(1, 0), Polarization::science);
}

TEST(Polarization, UnanimousAtFullThresholdIsNotAbove) {
    EXPECT_EQ(classify_polarization(10, 0, 1.0), Polarization::unpolarized);
}

TEST(Polarization, RejectsThresholdOutsideRange) {
    EXPECT_THROW(classify_polarization(1, 1, 0.5), std::invalid_argument);
    EXPECT_THROW(classify_polarization(1, 1, 1.01), std::invalid_argument);
}

TEST(Builder, EnforcesReferentialIntegrity) {
    CorpusBuilder builder;
    EXPECT_FALSE(builder.add_page({"P1", Narrative::science}));
    EXPECT_EQ(builder.add_page({"P1", Narrative::conspiracy}), "duplicate_page_id");
    EXPECT_EQ(builder.add_comment({"u", "nope", 0, ""}), "unknown_page");
    EXPECT_EQ(builder.add_like({"u", "nope"}), "unknown_page");
    EXPECT_EQ(builder.add_like({"", "P1"}), "empty_user_id");
    EXPECT_FALSE(builder.add_comment({"u", "P1", 0, ""}));
    const auto snapshot = std::move(builder).finish();
    ASSERT_EQ(snapshot.pages().size(), 1u);
    EXPECT_EQ(snapshot.pages().at("P1").narrative, Narrative::science);
}

TEST(LoadCorpus, EmptyCorpus) {
    TempDir dir;
    const auto result = load(CorpusFiles().page("P1", "Science"), dir);
    EXPECT_EQ(result.snapshot.pages().size(), 1u);
    EXPECT_TRUE(result.snapshot.users().empty());
    EXPECT_TRUE(result.snapshot.comments().empty());
}

TEST(LoadCorpus, AggregatesMatchRawRecount) {
    TempDir dir;
    CorpusFiles files;
    files.page("P1", "science").page("P2", "conspiracy").comments("alice", "P1", 60).likes("alice", "P1", 100);
    const auto result = load(files, dir);
    const auto* alice = result.snapshot.find_user("alice");
    ASSERT_NE(alice, nullptr);

    // Independent recount straight from the written files.
    std::size_t comments = 0, likes = 0;
    std::istringstream c(test::read_file(dir / "comments.jsonl")), l(test::read_file(dir / "likes.jsonl"));
    for (std::string line; std::getline(c, line);) comments += nlohmann::json::parse(line)["user_id"] == "alice";
    for (std::string line; std::getline(l, line);) likes += nlohmann::json::parse(line)["page_id"] == "P1";
    ASSERT_EQ(comments, 60u);
    ASSERT_EQ(likes, 100u);

    EXPECT_EQ(alice->comment_count, comments);
    EXPECT_EQ(alice->science_likes, likes);
    EXPECT_EQ(alice->conspiracy_likes, 0u);
    EXPECT_EQ(alice->polarization, Polarization::science);
    EXPECT_EQ(alice->comment_indices.size(), 60u);
}

TEST(LoadCorpus, RejectsUnknownPageLike) {
    TempDir dir;
    const auto result = load(CorpusFiles().page("P1", "science").likes("u", "UNKNOWN", 1), dir);
    EXPECT_EQ(result.report.likes.rejected, 1u);
    EXPECT_EQ(result.report.likes.accepted, 0u);
    EXPECT_EQ(result.report.likes.reasons.at("unknown_page"), 1u);
}

TEST(LoadCorpus, TalliesMalformedRecords) {
    TempDir dir;
    CorpusFiles files;
    files.page("P1", "science")
        .comments("u", "P1", 2)
        .raw_comment_line("{broken")
        .raw_comment_line(R"({"user_id":"u","page_id":"P1","message":"no time"})")
        .raw_comment_line(R"({"user_id":"u","page_id":"P1","created_time":"yesterday","message":"x"})")
        .raw_comment_line("{\"user_id\":\"u\",\"page_id\":\"P1\",\"created_time\":\"2012-01-01\",\"message\":\"\xFF\"}")
        .raw_like_line("[1,2]");
    const auto result = load(files, dir);
    EXPECT_EQ(result.report.comments.accepted, 2u);
    EXPECT_EQ(result.report.comments.rejected, 4u);
    EXPECT_EQ(result.report.comments.reasons.at("malformed_json"), 2u);  // includes invalid UTF-8
    EXPECT_EQ(result.report.comments.reasons.at("missing_field"), 1u);
    EXPECT_EQ(result.report.comments.reasons.at("bad_timestamp"), 1u);
    EXPECT_EQ(result.report.likes.reasons.at("malformed_json"), 1u);
}

TEST(LoadCorpus, RejectsBadPageRows) {
    TempDir dir;
    CorpusFiles files;
    files.page("P1", "science").page("P2", "astrology").page("P1", "conspiracy");
    const auto result = load(files, dir);
    EXPECT_EQ(result.report.pages.accepted, 1u);
    EXPECT_EQ(result.report.pages.reasons.at("unknown_narrative"), 1u);
    EXPECT_EQ(result.report.pages.reasons.at("duplicate_page_id"), 1u);
}

TEST(LoadCorpus, MissingFileIsFatal) {
    TempDir dir;
    const auto paths = CorpusFiles().page("P1", "science").write(dir.path());
    EXPECT_THROW(load_corpus(dir / "absent.csv", paths.comments, paths.likes), IngestError);
    EXPECT_THROW(load_corpus(paths.pages, dir / "absent.jsonl", paths.likes), IngestError);
}

TEST(LoadCorpus, RequiresPagesHeader) {
    TempDir dir;
    test::write_file(dir / "pages.csv", "P1,science\n");
    test::write_file(dir / "c.jsonl", "");
    EXPECT_THROW(load_corpus(dir / "pages.csv", dir / "c.jsonl", dir / "c.jsonl"), IngestError);
}

TEST(LoadCorpus, DateWindowFiltersComments) {
    TempDir dir;
    CorpusFiles files;
    files.page("P1", "science").comments("u", "P1", 5);  // all in March 2012
    LoadOptions options;
    options.from = parse_iso8601("2013-01-01");
    const auto result = load(files, dir, options);
    EXPECT_EQ(result.report.comments.accepted, 0u);
    EXPECT_EQ(result.report.comments.reasons.at("outside_date_window"), 5u);
}

TEST(Eligibility, BoundaryIsInclusive) {
    TempDir dir;
    CorpusFiles files;
    files.page("S", "science").page("C", "conspiracy");
    files.comments("at50", "S", 50).likes("at50", "S", 100);
    files.comments("at49", "S", 49).likes("at49", "S", 100);
    files.comments("neutral", "S", 200).likes("neutral", "S", 50).likes("neutral", "C", 50);
    files.comments("con", "C", 70).likes("con", "C", 96).likes("con", "S", 4);
    const auto result = load(files, dir);
    const auto eligible = eligible_users(result.snapshot, 50);
    EXPECT_EQ(eligible.science, std::vector<std::string>{"at50"});
    EXPECT_EQ(eligible.conspiracy, std::vector<std::string>{"con"});

    const auto relaxed = eligible_users(result.snapshot, 49);
    EXPECT_EQ(relaxed.science, (std::vector<std::string>{"at49", "at50"}));
}

TEST(Eligibility, EmptyResultPermitted) {
    const auto snapshot = CorpusBuilder().finish();
    const auto eligible = eligible_users(snapshot);
    EXPECT_TRUE(eligible.science.empty());
    EXPECT_TRUE(eligible.conspiracy.empty());
    EXPECT_THROW(eligible_users(snapshot, 0), std::invalid_argument);
}

TEST(Timestamps, ParsesCommonForms) {
    EXPECT_EQ(parse_iso8601("1970-01-01T00:00:00+0000"), 0);
    EXPECT_EQ(parse_iso8601("1970-01-01"), 0);
    EXPECT_EQ(parse_iso8601("2014-03-02T12:34:56Z"), 1393763696);
    EXPECT_EQ(parse_iso8601("2014-03-02 12:34:56.250Z"), 1393763696);
    EXPECT_EQ(parse_iso8601("2014-03-02T14:34:56+02:00"), 1393763696);
    EXPECT_EQ(parse_iso8601("2014-03-02T07:34:56-0500"), 1393763696);
    EXPECT_FALSE(parse_iso8601("2014-13-02"));
    EXPECT_FALSE(parse_iso8601("2014-02-30"));
    EXPECT_FALSE(parse_iso8601("March 2nd"));
    EXPECT_EQ(format_iso8601(1393763696), "2014-03-02T12:34:56+0000");
}

}  // namespace
}  // namespace chamberscope
