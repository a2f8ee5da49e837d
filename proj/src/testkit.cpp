// SPDX-License-Identifier: Apache-2.0
#include "chamberscope/testkit.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chamberscope/corpus.hpp"
#include "chamberscope/random.hpp"

namespace chamberscope::testkit {

namespace {

// Independently controllable per-user levels. sr is always im + we.
enum Knob : std::size_t { ap, cm, em, el, im, we, np, ne, nb, pa, pe, pp, qm, sl, sw, wc, yu, kKnobCount };

constexpr std::array<Feature, kKnobCount> kKnobFeature = {
    Feature::ap, Feature::cm, Feature::em, Feature::el, Feature::im, Feature::we,
    Feature::np, Feature::ne, Feature::nb, Feature::pa, Feature::pe, Feature::pp,
    Feature::qm, Feature::sl, Feature::sw, Feature::wc, Feature::yu};

// Mean count per comment at the low and high level. ap and wc leave room
// for every punctuation or word atom at its high level; the rest is filled
// with full stops and neutral words.
struct Levels {
    int low;
    int high;
};
constexpr std::array<Levels, kKnobCount> kLevels = {{
    {6, 8},   // ap
    {0, 1},   // cm
    {0, 1},   // em
    {0, 1},   // el
    {0, 1},   // im
    {0, 1},   // we
    {0, 1},   // np
    {0, 1},   // ne
    {0, 1},   // nb
    {0, 2},   // pa, one "(" ")" pair
    {0, 1},   // pe
    {0, 1},   // pp
    {0, 1},   // qm
    {0, 1},   // sl
    {0, 1},   // sw
    {8, 11},  // wc
    {0, 1},   // yu
}};

constexpr std::array<const char*, 20> kNeutralWords = {
    "the", "this", "is", "a",    "that", "it",    "and",  "what", "so",   "just",
    "people", "really", "think", "true", "news", "page", "post", "fact", "agree", "good"};
constexpr std::array<const char*, 8> kLongWords = {"evidence",   "research",  "government", "information",
                                                   "scientists", "something", "questions",  "absolutely"};

using Pattern = std::array<bool, kKnobCount>;

// Planted patterns tie im and we together so sr follows them; searched over
// 16 groups for the sparsest pattern producing the target model.
std::optional<Pattern> find_planted_pattern(const PersonalityModel& target, const SignMatrix& matrix) {
    std::vector<std::size_t> groups;
    for (std::size_t k = 0; k < kKnobCount; ++k)
        if (k != we) groups.push_back(k);
    std::optional<Pattern> best;
    int best_bits = std::numeric_limits<int>::max();
    for (std::uint32_t mask = 0; mask < (1u << groups.size()); ++mask) {
        const int bits = std::popcount(mask);
        if (bits >= best_bits) continue;
        Pattern p{};
        for (std::size_t g = 0; g < groups.size(); ++g) p[groups[g]] = (mask >> g) & 1u;
        p[we] = p[im];
        TraitScores scores;
        auto add = [&](Feature f) {
            for (auto t : kAllTraits) scores[t] += matrix.sign(f, t);
        };
        for (std::size_t k = 0; k < kKnobCount; ++k)
            if (p[k]) add(kKnobFeature[k]);
        if (p[im]) add(Feature::sr);
        if (to_labels(scores) == target) {
            best = p;
            best_bits = bits;
        }
    }
    return best;
}

struct UserPlan {
    std::string id;
    Narrative narrative;
    std::size_t comments;
    Pattern pattern;
    bool planted;
};

std::string render_comment(std::vector<std::string>& tokens, std::mt19937_64& rng) {
    shuffle(std::span<std::string>(tokens), rng);
    std::string text;
    for (const auto& t : tokens) {
        if (!text.empty()) text.push_back(' ');
        text += t;
    }
    return text;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SynthSpec& spec, const SignMatrix& matrix) {
    if (spec.users_per_narrative < 1) throw std::invalid_argument("synth: users_per_narrative must be >= 1");
    if (spec.min_comments < 1 || spec.max_comments < spec.min_comments)
        throw std::invalid_argument("synth: need 1 <= min_comments <= max_comments");
    if (!(spec.prevalence >= 0.0 && spec.prevalence <= 1.0))
        throw std::invalid_argument("synth: prevalence must be in [0, 1]");
    if (spec.pages_per_narrative < 1) throw std::invalid_argument("synth: pages_per_narrative must be >= 1");

    const auto pattern = find_planted_pattern(spec.planted, matrix);
    if (!pattern)
        throw std::invalid_argument(fmt::format(
            "synth: personality model '{}' is unreachable under the sign matrix: no combination of "
            "features above baseline yields it (check for all-zero trait columns)",
            spec.planted.str()));

    const auto planted_per_chamber =
        static_cast<std::size_t>(std::llround(spec.prevalence * static_cast<double>(spec.users_per_narrative)));
    const bool pattern_is_empty = std::none_of(pattern->begin(), pattern->end(), [](bool b) { return b; });
    if (planted_per_chamber == spec.users_per_narrative && !pattern_is_empty)
        throw std::invalid_argument(fmt::format(
            "synth: personality model '{}' needs non-planted users to hold the baseline below the "
            "planted features; lower the prevalence or add users",
            spec.planted.str()));

    std::mt19937_64 rng(spec.seed);
    std::vector<UserPlan> users;
    for (auto narrative : {Narrative::science, Narrative::conspiracy}) {
        std::vector<bool> planted(spec.users_per_narrative, false);
        std::fill_n(planted.begin(), planted_per_chamber, true);
        std::vector<std::size_t> order(spec.users_per_narrative);
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(std::span<std::size_t>(order), rng);
        const char prefix = narrative == Narrative::science ? 's' : 'c';
        for (std::size_t i = 0; i < spec.users_per_narrative; ++i) {
            UserPlan u;
            u.id = fmt::format("{}{:06}", prefix, i + 1);
            u.narrative = narrative;
            u.comments = spec.min_comments +
                         static_cast<std::size_t>(uniform_below(rng, spec.max_comments - spec.min_comments + 1));
            u.planted = planted[order[i]];
            if (u.planted) {
                u.pattern = *pattern;
            } else {
                for (auto& level : u.pattern) level = uniform_below(rng, 2) == 1;
            }
            users.push_back(std::move(u));
        }
    }

    // Each planted level must be strictly on one side of the baseline, so some
    // non-planted user has to hold the opposite level of every knob.
    if (planted_per_chamber > 0) {
        for (std::size_t k = 0; k < kKnobCount; ++k) {
            auto first_free = users.end();
            bool opposite_seen = false;
            for (auto it = users.begin(); it != users.end(); ++it) {
                if (it->planted) continue;
                if (first_free == users.end()) first_free = it;
                if (it->pattern[k] != (*pattern)[k]) opposite_seen = true;
            }
            if (!opposite_seen && first_free != users.end()) first_free->pattern[k] = !(*pattern)[k];
        }
    }

    SyntheticCorpus out;
    for (const auto& f : kAllFeatures) {
        if (f == Feature::sr) {
            if ((*pattern)[im]) out.planted_features.push_back(f);
            continue;
        }
        const auto k = static_cast<std::size_t>(std::find(kKnobFeature.begin(), kKnobFeature.end(), f) -
                                                kKnobFeature.begin());
        if ((*pattern)[k]) out.planted_features.push_back(f);
    }

    std::vector<std::string> science_pages, conspiracy_pages;
    out.pages_csv = "page_id,narrative\n";
    for (std::size_t p = 0; p < spec.pages_per_narrative; ++p) {
        science_pages.push_back(fmt::format("science_page_{}", p + 1));
        conspiracy_pages.push_back(fmt::format("conspiracy_page_{}", p + 1));
    }
    for (const auto& p : science_pages) out.pages_csv += p + ",science\n";
    for (const auto& p : conspiracy_pages) out.pages_csv += p + ",conspiracy\n";

    const std::int64_t window_start = *parse_iso8601("2010-01-01T00:00:00Z");
    const std::int64_t window_end = *parse_iso8601("2014-12-31T23:59:59Z");

    for (const auto& u : users) {
        if (u.planted) out.planted_users.push_back(u.id);
        const auto& own = u.narrative == Narrative::science ? science_pages : conspiracy_pages;
        const auto& other = u.narrative == Narrative::science ? conspiracy_pages : science_pages;
        const std::size_t n = u.comments;
        std::vector<std::vector<std::string>> tokens(n);
        auto scatter = [&](std::int64_t units, const auto& make) {
            for (std::int64_t i = 0; i < units; ++i) {
                auto& c = tokens[uniform_below(rng, n)];
                make(c);
            }
        };
        auto total = [&](Knob k) {
            const auto& lv = kLevels[k];
            return static_cast<std::int64_t>(n) * (u.pattern[k] ? lv.high : lv.low);
        };
        auto literal = [](const char* s) { return [s](std::vector<std::string>& c) { c.emplace_back(s); }; };

        scatter(total(cm), literal(","));
        scatter(total(em), literal("!"));
        scatter(total(qm), literal("?"));
        scatter(total(pa) / 2, [](std::vector<std::string>& c) {
            c.emplace_back("(");
            c.emplace_back(")");
        });
        scatter(total(ap) - total(cm) - total(em) - total(qm) - total(pa), literal("."));
        scatter(total(el), [&](std::vector<std::string>& c) {
            c.push_back(fmt::format("http://example.org/post/{}", uniform_below(rng, 100000)));
        });
        scatter(total(nb), [&](std::vector<std::string>& c) {
            c.push_back(fmt::format("{}", 1 + uniform_below(rng, 999)));
        });
        scatter(total(pe), literal(":)"));
        scatter(total(ne), literal(":("));
        scatter(total(im), literal("me"));
        scatter(total(we), literal("us"));
        scatter(total(yu), literal("you"));
        scatter(total(pp), literal("in"));
        scatter(total(np), literal("not"));
        scatter(total(sw), literal("damn"));
        scatter(total(sl), [&](std::vector<std::string>& c) {
            c.emplace_back(kLongWords[uniform_below(rng, kLongWords.size())]);
        });
        const std::int64_t word_atoms =
            total(im) + total(we) + total(yu) + total(pp) + total(np) + total(sw) + total(sl);
        scatter(total(wc) - word_atoms, [&](std::vector<std::string>& c) {
            c.emplace_back(kNeutralWords[uniform_below(rng, kNeutralWords.size())]);
        });

        for (auto& comment_tokens : tokens) {
            nlohmann::json line = {
                {"user_id", u.id},
                {"page_id", own[uniform_below(rng, own.size())]},
                {"created_time",
                 format_iso8601(window_start +
                                static_cast<std::int64_t>(uniform_below(
                                    rng, static_cast<std::uint64_t>(window_end - window_start + 1))))},
                {"message", render_comment(comment_tokens, rng)}};
            out.comments_jsonl += line.dump();
            out.comments_jsonl.push_back('\n');
        }

        // 25..60 likes on the user's own narrative, sometimes one stray like
        // on the other; 25/26 is still above a 0.95 threshold.
        const auto own_likes = 25 + uniform_below(rng, 36);
        for (std::uint64_t i = 0; i < own_likes; ++i)
            out.likes_jsonl +=
                nlohmann::json{{"user_id", u.id}, {"page_id", own[uniform_below(rng, own.size())]}}.dump() + "\n";
        if (uniform_below(rng, 2) == 1)
            out.likes_jsonl +=
                nlohmann::json{{"user_id", u.id}, {"page_id", other[uniform_below(rng, other.size())]}}.dump() + "\n";
    }
    return out;
}

void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    auto write = [&](const char* name, const std::string& body) {
        std::ofstream out(directory / name, std::ios::binary);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", (directory / name).string()));
        out << body;
    };
    write("pages.csv", corpus.pages_csv);
    write("comments.jsonl", corpus.comments_jsonl);
    write("likes.jsonl", corpus.likes_jsonl);
}

TestResult exact_mann_whitney(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("exact_mann_whitney: empty sample");
    const std::size_t n = a.size() + b.size();
    if (n > 14) throw std::invalid_argument("exact_mann_whitney: n_a + n_b must not exceed 14");

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    // Doubled average ranks by direct counting: 2 * (#less) + (#equal) + 1.
    std::vector<std::int64_t> twice_rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t less = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            less += pooled[j] < pooled[i];
            equal += pooled[j] == pooled[i];
        }
        twice_rank[i] = 2 * less + equal + 1;
    }
    const auto na = static_cast<std::int64_t>(a.size());
    auto twice_u = [&](std::uint32_t mask) {
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u) sum += twice_rank[i];
        return sum - na * (na + 1);
    };
    const std::int64_t observed = twice_u((1u << a.size()) - 1);
    std::uint64_t lo = 0, hi = 0, total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != static_cast<int>(a.size())) continue;
        const auto u = twice_u(mask);
        ++total;
        if (u <= observed) ++lo;
        if (u >= observed) ++hi;
    }
    TestResult result;
    result.statistic = static_cast<double>(observed) / 2.0;
    result.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(lo, hi)) / static_cast<double>(total));
    result.method = TestMethod::exact;
    return result;
}

TestResult exhaustive_mantel(const Matrix5& m1, const Matrix5& m2) {
    auto upper = [](const Matrix5& m) {
        std::vector<double> v;
        for (std::size_t i = 0; i < kTraitCount; ++i)
            for (std::size_t j = i + 1; j < kTraitCount; ++j) v.push_back(m[i][j]);
        return v;
    };
    const auto x = upper(m1);
    TestResult result;
    result.method = TestMethod::permutation;
    const auto observed = try_pearson(x, upper(m2));
    if (!observed) {
        result.applicable = false;
        result.statistic = std::numeric_limits<double>::quiet_NaN();
        result.p_value = 1.0;
        return result;
    }
    std::array<std::size_t, kTraitCount> p{0, 1, 2, 3, 4};
    std::size_t hits = 0, total = 0;
    do {
        Matrix5 permuted{};
        for (std::size_t i = 0; i < kTraitCount; ++i)
            for (std::size_t j = 0; j < kTraitCount; ++j) permuted[i][j] = m2[p[i]][p[j]];
        const auto r = try_pearson(x, upper(permuted));
        ++total;
        if (r && *r >= *observed - kMantelTieTolerance) ++hits;
    } while (std::next_permutation(p.begin(), p.end()));
    result.statistic = *observed;
    result.p_value = static_cast<double>(hits) / static_cast<double>(total);
    result.replicates = total;
    return result;
}

}  // namespace chamberscope::testkit
