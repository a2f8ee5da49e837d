// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace chamberscope {

/// The 18 linguistic features, in canonical order.
enum class Feature : std::uint8_t {
    ap,  // all punctuation
    cm,  // commas
    em,  // exclamation marks
    el,  // external links
    im,  // first person singular pronouns
    np,  // negative particles
    ne,  // negative emoticons
    nb,  // numbers
    pa,  // parentheses
    pe,  // positive emoticons
    pp,  // prepositions
    qm,  // question marks
    sl,  // words longer than six letters
    sr,  // first person pronouns (singular and plural)
    sw,  // vulgar words
    wc,  // words
    we,  // first person plural pronouns
    yu,  // second person pronouns
};

inline constexpr std::size_t kFeatureCount = 18;

inline constexpr std::array<Feature, kFeatureCount> kAllFeatures = {
    Feature::ap, Feature::cm, Feature::em, Feature::el, Feature::im, Feature::np,
    Feature::ne, Feature::nb, Feature::pa, Feature::pe, Feature::pp, Feature::qm,
    Feature::sl, Feature::sr, Feature::sw, Feature::wc, Feature::we, Feature::yu};

std::string_view to_string(Feature feature) noexcept;
std::optional<Feature> parse_feature(std::string_view code);

template <typename T>
struct FeatureArray {
    std::array<T, kFeatureCount> values{};

    T& operator[](Feature f) noexcept { return values[static_cast<std::size_t>(f)]; }
    const T& operator[](Feature f) const noexcept { return values[static_cast<std::size_t>(f)]; }

    bool operator==(const FeatureArray&) const = default;
};

/// Integer feature counts of a single comment.
using FeatureCounts = FeatureArray<std::int64_t>;
/// Per-user (or corpus-wide) mean counts.
using FeatureVector = FeatureArray<double>;

enum class TokenKind { word, number, emoticon, url, punctuation };
enum class Polarity { none, positive, negative };

const char* to_string(TokenKind kind) noexcept;

struct Token {
    TokenKind kind;
    /// Case-folded for words (typographic apostrophes become '\''); the
    /// original bytes otherwise.
    std::string text;
    /// Byte span in the input.
    std::size_t offset;
    std::size_t length;
    Polarity polarity = Polarity::none;
    /// Alphabetic characters in a word token.
    std::size_t letters = 0;
};

/// Word lists and patterns behind the lexicon-driven features.
struct Lexicons {
    std::unordered_set<std::string> first_singular;  // im
    std::unordered_set<std::string> first_plural;    // we
    std::unordered_set<std::string> second_person;   // yu
    std::unordered_set<std::string> prepositions;    // pp
    std::unordered_set<std::string> negations;       // np
    std::unordered_set<std::string> vulgar;          // sw
    std::vector<std::string> positive_emoticons;     // pe
    std::vector<std::string> negative_emoticons;     // ne
    std::vector<std::string> url_prefixes;           // el, matched case-insensitively

    /// English defaults; identical to the files shipped in data/lexicons.
    static const Lexicons& defaults();

    /// Loads one file per category from a directory (see kLexiconFiles).
    /// Throws ConfigError when a file is missing.
    static Lexicons load(const std::filesystem::path& directory);
};

/// File names read by Lexicons::load, in member order.
inline constexpr std::array<std::string_view, 9> kLexiconFiles = {
    "pronouns_im.txt",     "pronouns_we.txt",     "pronouns_yu.txt",
    "prepositions.txt",    "negations.txt",       "vulgar.txt",
    "emoticons_pos.txt",   "emoticons_neg.txt",   "url_prefixes.txt"};

/// Parses a lexicon file body: one entry per line, '#' starts a comment,
/// surrounding whitespace ignored. Word lists are lowercased and deduplicated.
std::vector<std::string> parse_lexicon(std::string_view body, bool lowercase);

/// Splits text into tokens. URLs are matched first, then emoticons, numbers,
/// words and finally single punctuation characters.
std::vector<Token> tokenize(std::string_view text, const Lexicons& lexicons = Lexicons::defaults());

FeatureCounts extract_features(std::span<const Token> tokens, const Lexicons& lexicons);
FeatureCounts extract_features(std::string_view text, const Lexicons& lexicons = Lexicons::defaults());

/// Component-wise mean of a user's comment vectors. Throws
/// std::invalid_argument on an empty list.
FeatureVector user_feature_means(std::span<const FeatureCounts> comment_vectors);

}  // namespace chamberscope
