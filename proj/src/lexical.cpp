// SPDX-License-Identifier: Apache-2.0
#include "chamberscope/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "chamberscope/error.hpp"
#include "embedded_data.hpp"

namespace chamberscope {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "ap", "cm", "em", "el", "im", "np", "ne", "nb", "pa",
    "pe", "pp", "qm", "sl", "sr", "sw", "wc", "we", "yu"};

struct CodePoint {
    char32_t value;
    std::size_t length;  // bytes consumed
    bool valid;
};

CodePoint decode(std::string_view text, std::size_t pos) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    if (lead < 0x80) return {lead, 1, true};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        return {0xFFFD, 1, false};
    }
    if (pos + len > text.size()) return {0xFFFD, 1, false};
    for (std::size_t i = 1; i < len; ++i) {
        const auto c = static_cast<unsigned char>(text[pos + i]);
        if ((c & 0xC0) != 0x80) return {0xFFFD, 1, false};
        cp = (cp << 6) | (c & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return {0xFFFD, 1, false};
    return {cp, len, true};
}

bool is_space(char32_t cp) {
    if (cp < 0x80) return cp == ' ' || (cp >= '\t' && cp <= '\r');
    return cp == 0x00A0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x2028 ||
           cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

// ASCII letters plus non-ASCII code points outside the punctuation, symbol
// and emoji blocks.
bool is_letter(char32_t cp) {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7) return false;
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;
    if (cp >= 0x3000 && cp <= 0x303F) return false;
    if (cp >= 0xFE00 && cp <= 0xFE0F) return false;
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
    if (cp >= 0xFF00 && cp <= 0xFF20) return false;
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;
    if (cp == 0xFFFD) return false;
    return true;
}

bool is_alnum(char32_t cp) { return is_letter(cp) || is_digit(cp); }

// Joiners allowed inside a word: apostrophes and hyphens.
bool is_joiner(char32_t cp) { return cp == '\'' || cp == 0x2019 || cp == '-' || cp == 0x2010; }

bool ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool iequals_prefix(std::string_view text, std::string_view prefix) {
    if (text.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(text[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    return true;
}

class Scanner {
public:
    Scanner(std::string_view text, const Lexicons& lexicons) : text_(text), lex_(lexicons) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        std::size_t pos = 0;
        while (pos < text_.size()) {
            const auto cp = decode(text_, pos);
            if (cp.valid && is_space(cp.value)) {
                pos += cp.length;
                continue;
            }
            auto token = scan_url(pos);
            if (!token) token = scan_emoticon(pos);
            if (!token) token = scan_number(pos);
            if (!token) token = scan_word(pos);
            if (!token)
                token = Token{TokenKind::punctuation, std::string(text_.substr(pos, cp.length)), pos,
                              cp.length};
            pos = token->offset + token->length;
            tokens.push_back(std::move(*token));
        }
        return tokens;
    }

private:
    // Code point ending just before byte position pos.
    std::optional<char32_t> previous(std::size_t pos) const {
        if (pos == 0) return std::nullopt;
        std::size_t start = pos - 1;
        while (start > 0 && pos - start < 4 && (static_cast<unsigned char>(text_[start]) & 0xC0) == 0x80)
            --start;
        const auto cp = decode(text_, start);
        if (start + cp.length != pos) return 0xFFFD;
        return cp.value;
    }

    std::optional<char32_t> at(std::size_t pos) const {
        if (pos >= text_.size()) return std::nullopt;
        return decode(text_, pos).value;
    }

    std::optional<Token> scan_url(std::size_t pos) const {
        if (auto prev = previous(pos); prev && is_alnum(*prev)) return std::nullopt;
        const auto rest = text_.substr(pos);
        for (const auto& prefix : lex_.url_prefixes) {
            if (prefix.empty() || !iequals_prefix(rest, prefix)) continue;
            std::size_t end = pos;
            while (end < text_.size()) {
                const auto cp = decode(text_, end);
                if (cp.valid && is_space(cp.value)) break;
                end += cp.length;
            }
            // Sentence punctuation trailing a link is not part of it.
            while (end > pos + prefix.size()) {
                const char last = text_[end - 1];
                const auto body = text_.substr(pos, end - pos);
                const auto opens = [&](char o) { return std::count(body.begin(), body.end(), o); };
                if (std::string_view(".,!?;:'\"").find(last) != std::string_view::npos ||
                    (last == ')' && opens(')') > opens('(')) ||
                    (last == ']' && opens(']') > opens('['))) {
                    --end;
                    continue;
                }
                break;
            }
            if (end <= pos + prefix.size()) continue;
            return Token{TokenKind::url, std::string(text_.substr(pos, end - pos)), pos, end - pos};
        }
        return std::nullopt;
    }

    std::optional<Token> scan_emoticon(std::size_t pos) const {
        const auto rest = text_.substr(pos);
        const std::string* best = nullptr;
        Polarity polarity = Polarity::none;
        auto consider = [&](const std::vector<std::string>& list, Polarity p) {
            for (const auto& e : list) {
                if (e.empty() || !rest.starts_with(e)) continue;
                if (best && e.size() <= best->size()) continue;
                if (ascii_alnum(e.front())) {
                    if (auto prev = previous(pos); prev && is_alnum(*prev)) continue;
                }
                if (ascii_alnum(e.back())) {
                    if (auto next = at(pos + e.size()); next && is_alnum(*next)) continue;
                }
                best = &e;
                polarity = p;
            }
        };
        consider(lex_.positive_emoticons, Polarity::positive);
        consider(lex_.negative_emoticons, Polarity::negative);
        if (!best) return std::nullopt;
        Token token{TokenKind::emoticon, *best, pos, best->size()};
        token.polarity = polarity;
        return token;
    }

    std::optional<Token> scan_number(std::size_t pos) const {
        if (!is_digit(static_cast<unsigned char>(text_[pos]))) return std::nullopt;
        auto digits = [&](std::size_t p) {
            while (p < text_.size() && is_digit(static_cast<unsigned char>(text_[p]))) ++p;
            return p;
        };
        std::size_t end = digits(pos);
        if (end + 1 < text_.size() && text_[end] == '.' && is_digit(static_cast<unsigned char>(text_[end + 1])))
            end = digits(end + 1);
        return Token{TokenKind::number, std::string(text_.substr(pos, end - pos)), pos, end - pos};
    }

    std::optional<Token> scan_word(std::size_t pos) const {
        const auto first = decode(text_, pos);
        if (!first.valid || !is_letter(first.value)) return std::nullopt;
        Token token{TokenKind::word, {}, pos, 0};
        std::size_t p = pos;
        while (p < text_.size()) {
            const auto cp = decode(text_, p);
            if (cp.valid && is_alnum(cp.value)) {
                if (is_letter(cp.value)) ++token.letters;
                if (cp.value < 0x80)
                    token.text.push_back(static_cast<char>(std::tolower(static_cast<int>(cp.value))));
                else
                    append_utf8(token.text, cp.value);
                p += cp.length;
                continue;
            }
            if (cp.valid && is_joiner(cp.value) && p + cp.length < text_.size()) {
                const auto next = decode(text_, p + cp.length);
                if (next.valid && is_alnum(next.value)) {
                    token.text.push_back(cp.value == '\'' || cp.value == 0x2019 ? '\'' : '-');
                    p += cp.length;
                    continue;
                }
            }
            break;
        }
        token.length = p - pos;
        return token;
    }

    std::string_view text_;
    const Lexicons& lex_;
};

std::unordered_set<std::string> to_set(std::vector<std::string> items) {
    return {std::make_move_iterator(items.begin()), std::make_move_iterator(items.end())};
}

Lexicons from_bodies(const std::array<std::string, kLexiconFiles.size()>& bodies) {
    Lexicons lex;
    lex.first_singular = to_set(parse_lexicon(bodies[0], true));
    lex.first_plural = to_set(parse_lexicon(bodies[1], true));
    lex.second_person = to_set(parse_lexicon(bodies[2], true));
    lex.prepositions = to_set(parse_lexicon(bodies[3], true));
    lex.negations = to_set(parse_lexicon(bodies[4], true));
    lex.vulgar = to_set(parse_lexicon(bodies[5], true));
    lex.positive_emoticons = parse_lexicon(bodies[6], false);
    lex.negative_emoticons = parse_lexicon(bodies[7], false);
    lex.url_prefixes = parse_lexicon(bodies[8], true);
    return lex;
}

}  // namespace

std::string_view to_string(Feature feature) noexcept {
    return kFeatureNames[static_cast<std::size_t>(feature)];
}

std::optional<Feature> parse_feature(std::string_view code) {
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        if (kFeatureNames[i] == code) return static_cast<Feature>(i);
    return std::nullopt;
}

const char* to_string(TokenKind kind) noexcept {
    switch (kind) {
        case TokenKind::word: return "word";
        case TokenKind::number: return "number";
        case TokenKind::emoticon: return "emoticon";
        case TokenKind::url: return "url";
        case TokenKind::punctuation: return "punct";
    }
    return "punct";
}

std::vector<std::string> parse_lexicon(std::string_view body, bool lowercase) {
    std::vector<std::string> out;
    std::istringstream in{std::string(body)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        auto entry = line.substr(first, last - first + 1);
        if (lowercase)
            std::transform(entry.begin(), entry.end(), entry.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (std::find(out.begin(), out.end(), entry) == out.end()) out.push_back(std::move(entry));
    }
    return out;
}

const Lexicons& Lexicons::defaults() {
    static const Lexicons lexicons = [] {
        std::array<std::string, kLexiconFiles.size()> bodies;
        for (std::size_t i = 0; i < kLexiconFiles.size(); ++i)
            bodies[i] = std::string(detail::embedded_file(kLexiconFiles[i]).value());
        return from_bodies(bodies);
    }();
    return lexicons;
}

Lexicons Lexicons::load(const std::filesystem::path& directory) {
    std::array<std::string, kLexiconFiles.size()> bodies;
    for (std::size_t i = 0; i < kLexiconFiles.size(); ++i) {
        const auto path = directory / kLexiconFiles[i];
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError(fmt::format("cannot open lexicon file '{}'", path.string()));
        std::ostringstream buffer;
        buffer << in.rdbuf();
        bodies[i] = buffer.str();
    }
    return from_bodies(bodies);
}

std::vector<Token> tokenize(std::string_view text, const Lexicons& lexicons) {
    return Scanner(text, lexicons).run();
}

FeatureCounts extract_features(std::span<const Token> tokens, const Lexicons& lexicons) {
    FeatureCounts f;
    for (const auto& token : tokens) {
        switch (token.kind) {
            case TokenKind::punctuation:
                ++f[Feature::ap];
                if (token.text == ",") ++f[Feature::cm];
                if (token.text == "!") ++f[Feature::em];
                if (token.text == "?") ++f[Feature::qm];
                if (token.text == "(" || token.text == ")") ++f[Feature::pa];
                break;
            case TokenKind::url: ++f[Feature::el]; break;
            case TokenKind::number: ++f[Feature::nb]; break;
            case TokenKind::emoticon:
                if (token.polarity == Polarity::positive) ++f[Feature::pe];
                if (token.polarity == Polarity::negative) ++f[Feature::ne];
                break;
            case TokenKind::word:
                ++f[Feature::wc];
                if (token.letters > 6) ++f[Feature::sl];
                if (lexicons.first_singular.count(token.text)) ++f[Feature::im];
                if (lexicons.first_plural.count(token.text)) ++f[Feature::we];
                if (lexicons.second_person.count(token.text)) ++f[Feature::yu];
                if (lexicons.prepositions.count(token.text)) ++f[Feature::pp];
                if (lexicons.negations.count(token.text)) ++f[Feature::np];
                if (lexicons.vulgar.count(token.text)) ++f[Feature::sw];
                break;
        }
    }
    f[Feature::sr] = f[Feature::im] + f[Feature::we];
    return f;
}

FeatureCounts extract_features(std::string_view text, const Lexicons& lexicons) {
    const auto tokens = tokenize(text, lexicons);
    return extract_features(tokens, lexicons);
}

FeatureVector user_feature_means(std::span<const FeatureCounts> comment_vectors) {
    if (comment_vectors.empty())
        throw std::invalid_argument("user_feature_means: no comments (eligibility filter bypassed?)");
    FeatureCounts sums;
    for (const auto& v : comment_vectors)
        for (std::size_t i = 0; i < kFeatureCount; ++i) sums.values[i] += v.values[i];
    FeatureVector means;
    const auto n = static_cast<double>(comment_vectors.size());
    for (std::size_t i = 0; i < kFeatureCount; ++i) means.values[i] = static_cast<double>(sums.values[i]) / n;
    return means;
}

}  // namespace chamberscope
