// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <chamberscope/error.hpp>
#include <chamberscope/lexical.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

namespace chamberscope {
namespace {

using enum Feature;

struct Expect {
    TokenKind kind;
    std::string text;
};

void expect_tokens(std::string_view input, const std::vector<Expect>& expected) {
    const auto tokens = tokenize(input);
    ASSERT_EQ(tokens.size(), expected.size()) << input;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        EXPECT_EQ(tokens[i].kind, expected[i].kind) << input << " token " << i;
        EXPECT_EQ(tokens[i].text, expected[i].text) << input << " token " << i;
    }
}

constexpr auto W = TokenKind::word;
constexpr auto N = TokenKind::number;
constexpr auto E = TokenKind::emoticon;
constexpr auto U = TokenKind::url;
constexpr auto P = TokenKind::punctuation;

TEST(Features, CanonicalOrder) {
    const std::vector<std::string> codes = {"ap", "cm", "em", "el", "im", "np", "ne", "nb", "pa",
                                            "pe", "pp", "qm", "sl", "sr", "sw", "wc", "we", "yu"};
    ASSERT_EQ(kAllFeatures.size(), 18u);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        EXPECT_EQ(to_string(kAllFeatures[i]), codes[i]);
        EXPECT_EQ(static_cast<std::size_t>(kAllFeatures[i]), i);
        EXPECT_EQ(parse_feature(codes[i]), kAllFeatures[i]);
    }
    EXPECT_FALSE(parse_feature("zz"));
}

TEST(Tokenize, Empty) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, WordsPunctuationEmoticon) {
    expect_tokens("I won!! :)", {{W, "i"}, {W, "won"}, {P, "!"}, {P, "!"}, {E, ":)"}});
}

TEST(Tokenize, UrlBeforeParentheses) {
    expect_tokens("see http://a.io (now)", {{W, "see"}, {U, "http://a.io"}, {P, "("}, {W, "now"}, {P, ")"}});
}

TEST(Tokenize, UrlTrailingPunctuationAndBrackets) {
    expect_tokens("(www.x.org/a).", {{P, "("}, {U, "www.x.org/a"}, {P, ")"}, {P, "."}});
    expect_tokens("HTTPS://A.B/c?d=1,", {{U, "HTTPS://A.B/c?d=1"}, {P, ","}});
    expect_tokens("wiki (http://w.org/Foo_(bar))", {{W, "wiki"}, {P, "("}, {U, "http://w.org/Foo_(bar)"}, {P, ")"}});
}

TEST(Tokenize, UrlNeedsWordBoundary) {
    expect_tokens("xhttp://a", {{W, "xhttp"}, {E, ":/"}, {P, "/"}, {W, "a"}});
}

TEST(Tokenize, EmoticonInsideUrlIsNotEmoticon) {
    const auto tokens = tokenize("http://x.org/:/");
    ASSERT_EQ(tokens.size(), 1u);
    EXPECT_EQ(tokens[0].kind, TokenKind::url);
}

TEST(Tokenize, EmoticonsNeedBoundaryOnAlphanumericEdge) {
    expect_tokens("Hey:D", {{W, "hey"}, {E, ":D"}});
    expect_tokens("re:Data", {{W, "re"}, {P, ":"}, {W, "data"}});
    expect_tokens("<3<3", {{E, "<3"}, {E, "<3"}});
    expect_tokens("a<3", {{W, "a"}, {E, "<3"}});
    expect_tokens("<3b", {{P, "<"}, {N, "3"}, {W, "b"}});
    expect_tokens(":-):(", {{E, ":-)"}, {E, ":("}});
}

TEST(Tokenize, EmoticonPolarity) {
    const auto tokens = tokenize(":) :( <3 :/");
    ASSERT_EQ(tokens.size(), 4u);
    EXPECT_EQ(tokens[0].polarity, Polarity::positive);
    EXPECT_EQ(tokens[1].polarity, Polarity::negative);
    EXPECT_EQ(tokens[2].polarity, Polarity::positive);
    EXPECT_EQ(tokens[3].polarity, Polarity::negative);
}

TEST(Tokenize, Numbers) {
    expect_tokens("3.14 1. 2,5 10%", {{N, "3.14"}, {N, "1"}, {P, "."}, {N, "2"}, {P, ","}, {N, "5"}, {N, "10"},
                                      {P, "%"}});
    expect_tokens("abc123", {{W, "abc123"}});
}

TEST(Tokenize, WordJoinersAndApostrophes) {
    expect_tokens("Don\xE2\x80\x99t well-known x- 'quoted'",
                  {{W, "don't"}, {W, "well-known"}, {W, "x"}, {P, "-"}, {P, "'"}, {W, "quoted"}, {P, "'"}});
}

TEST(Tokenize, NonAsciiLettersAndSymbols) {
    const auto tokens = tokenize("\xC3\x9C" "ber caf\xC3\xA9 \xF0\x9F\x98\x80");
    ASSERT_EQ(tokens.size(), 3u);
    EXPECT_EQ(tokens[0].kind, TokenKind::word);
    EXPECT_EQ(tokens[0].letters, 4u);
    EXPECT_EQ(tokens[1].kind, TokenKind::word);
    EXPECT_EQ(tokens[2].kind, TokenKind::punctuation);
    EXPECT_EQ(tokens[2].length, 4u);
}

TEST(Tokenize, InvalidBytesBecomeSingleBytePunctuation) {
    const auto tokens = tokenize("a\xFF" "b");
    ASSERT_EQ(tokens.size(), 3u);
    EXPECT_EQ(tokens[1].kind, TokenKind::punctuation);
    EXPECT_EQ(tokens[1].length, 1u);
}

TEST(ExtractFeatures, EmptyIsZero) { EXPECT_EQ(extract_features(""), FeatureCounts{}); }

TEST(ExtractFeatures, FirstPersonExclamations) {
    // Four word tokens: i, think, we, won.
    const auto f = extract_features("I think we won!! :)");
    FeatureCounts expected;
    expected[wc] = 4;
    expected[im] = 1;
    expected[we] = 1;
    expected[sr] = 2;
    expected[em] = 2;
    expected[ap] = 2;
    expected[pe] = 1;
    EXPECT_EQ(f, expected);
}

TEST(ExtractFeatures, ParenthesesColonQuestion) {
    const auto f = extract_features("Check (this): over 9000 reasons?");
    EXPECT_EQ(f[pa], 2);
    EXPECT_EQ(f[cm], 0);
    EXPECT_EQ(f[qm], 1);
    EXPECT_EQ(f[nb], 1);
    EXPECT_EQ(f[sl], 1);  // "reasons"; "check" has five letters
    EXPECT_EQ(f[ap], f[pa] + f[qm] + 1);
}

TEST(ExtractFeatures, LongWordsCountLettersOnly) {
    EXPECT_EQ(extract_features("abcdef abcdefg")[sl], 1);
    EXPECT_EQ(extract_features("abc123456")[sl], 0);
    EXPECT_EQ(extract_features("can't-stop")[sl], 1);
}

TEST(ExtractFeatures, MatchesGoldenCorpus) {
    const auto rows = test::load_golden();
    ASSERT_GE(rows.size(), 25u);
    for (const auto& row : rows) {
        const auto got = extract_features(row.text);
        for (auto f : kAllFeatures)
            EXPECT_EQ(got[f], row.expected[f]) << "feature " << to_string(f) << " of '" << row.text << "'";
    }
}

TEST(ExtractFeatures, GoldenCorpusCoversEveryFeatureTwice) {
    const auto rows = test::load_golden();
    for (auto f : kAllFeatures) {
        const auto hits = std::count_if(rows.begin(), rows.end(), [f](const auto& r) { return r.expected[f] > 0; });
        EXPECT_GE(hits, 2) << to_string(f);
    }
}

TEST(UserMeans, IdempotentAndMidpoint) {
    FeatureCounts v;
    for (std::size_t i = 0; i < kFeatureCount; ++i) v.values[i] = static_cast<std::int64_t>(i * 3 + 1);
    const std::vector<FeatureCounts> twice{v, v};
    const auto mean = user_feature_means(twice);
    for (std::size_t i = 0; i < kFeatureCount; ++i) EXPECT_EQ(mean.values[i], static_cast<double>(v.values[i]));

    FeatureCounts twos;
    twos.values.fill(2);
    const std::vector<FeatureCounts> pair{FeatureCounts{}, twos};
    for (double x : user_feature_means(pair).values) EXPECT_EQ(x, 1.0);
}

TEST(UserMeans, MatchesIndependentSummation) {
    std::mt19937_64 rng(50);
    std::uniform_int_distribution<std::int64_t> count(0, 40);
    std::vector<FeatureCounts> vectors(50);
    for (auto& v : vectors)
        for (auto& x : v.values) x = count(rng);
    const auto mean = user_feature_means(vectors);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        long double sum = 0;
        for (const auto& v : vectors) sum += v.values[i];
        EXPECT_DOUBLE_EQ(mean.values[i], static_cast<double>(sum / 50));
    }
}

TEST(UserMeans, EmptyIsAnError) {
    EXPECT_THROW(user_feature_means(std::span<const FeatureCounts>{}), std::invalid_argument);
}

TEST(Lexicons, ParseNormalises) {
    EXPECT_EQ(parse_lexicon("# comment\n Me \nme\n\nMY # trailing\n", true),
              (std::vector<std::string>{"me", "my"}));
    EXPECT_EQ(parse_lexicon(":D\n:d\n", false), (std::vector<std::string>{":D", ":d"}));
}

TEST(Lexicons, ShippedFilesMatchDefaults) {
    const auto loaded = Lexicons::load(test::kSourceDataDir / "lexicons");
    const auto& defaults = Lexicons::defaults();
    EXPECT_EQ(loaded.first_singular, defaults.first_singular);
    EXPECT_EQ(loaded.first_plural, defaults.first_plural);
    EXPECT_EQ(loaded.second_person, defaults.second_person);
    EXPECT_EQ(loaded.prepositions, defaults.prepositions);
    EXPECT_EQ(loaded.negations, defaults.negations);
    EXPECT_EQ(loaded.vulgar, defaults.vulgar);
    EXPECT_EQ(loaded.positive_emoticons, defaults.positive_emoticons);
    EXPECT_EQ(loaded.negative_emoticons, defaults.negative_emoticons);
    EXPECT_EQ(loaded.url_prefixes, defaults.url_prefixes);
}

TEST(Lexicons, WordListsAreLowercaseAndDistinct) {
    const auto& lex = Lexicons::defaults();
    for (const auto* list : {&lex.first_singular, &lex.first_plural, &lex.second_person, &lex.prepositions,
                             &lex.negations, &lex.vulgar}) {
        EXPECT_FALSE(list->empty());
        for (const auto& word : *list)
            EXPECT_TRUE(std::none_of(word.begin(), word.end(), [](unsigned char c) { return std::isupper(c); }))
                << word;
    }
    std::set<std::string> emoticons(lex.positive_emoticons.begin(), lex.positive_emoticons.end());
    for (const auto& e : lex.negative_emoticons) EXPECT_TRUE(emoticons.insert(e).second) << e;
}

TEST(Lexicons, CustomDirectoryChangesCounts) {
    test::TempDir dir;
    for (auto name : kLexiconFiles) test::write_file(dir / std::string(name), "");
    test::write_file(dir / "vulgar.txt", "heck\n");
    test::write_file(dir / "url_prefixes.txt", "http://\n");
    const auto lex = Lexicons::load(dir.path());
    const auto f = extract_features("heck damn :) http://a.b", lex);
    EXPECT_EQ(f[sw], 1);
    EXPECT_EQ(f[pe], 0);
    EXPECT_EQ(f[el], 1);
}

TEST(Lexicons, MissingFileIsConfigError) {
    test::TempDir dir;
    EXPECT_THROW(Lexicons::load(dir.path()), ConfigError);
}

}  // namespace
}  // namespace chamberscope
