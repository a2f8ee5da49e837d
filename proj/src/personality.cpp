// SPDX-License-Identifier: Apache-2.0
#include "chamberscope/personality.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "chamberscope/csv.hpp"
#include "chamberscope/error.hpp"
#include "embedded_data.hpp"

namespace chamberscope {

namespace {

constexpr std::array<std::string_view, kTraitCount> kTraitCodes = {"E", "S", "A", "C", "O"};
constexpr std::array<std::string_view, kTraitCount> kTraitNames = {
    "extraversion", "emotional stability", "agreeableness", "conscientiousness", "openness"};

std::string trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<int> parse_sign(std::string_view cell) {
    if (cell == "1" || cell == "+1") return 1;
    if (cell == "0" || cell == "-0" || cell == "+0") return 0;
    if (cell == "-1") return -1;
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Trait trait) noexcept { return kTraitCodes[static_cast<std::size_t>(trait)]; }

std::string_view trait_name(Trait trait) noexcept { return kTraitNames[static_cast<std::size_t>(trait)]; }

void SignMatrix::set(Feature feature, Trait trait, int sign) {
    if (sign < -1 || sign > 1) throw std::invalid_argument(fmt::format("sign {} not in {{-1,0,1}}", sign));
    cells_[static_cast<std::size_t>(feature)][static_cast<std::size_t>(trait)] = static_cast<std::int8_t>(sign);
}

std::size_t SignMatrix::nonzero_count(Trait trait) const noexcept {
    std::size_t n = 0;
    for (const auto& row : cells_) n += row[static_cast<std::size_t>(trait)] != 0;
    return n;
}

SignMatrix SignMatrix::parse(std::string_view body, std::string_view source) {
    SignMatrix matrix;
    std::array<bool, kFeatureCount> seen{};
    bool header_seen = false;
    std::istringstream in{std::string(body)};
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(fmt::format("{}:{}: {}", source, line_no, msg));
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto stripped = trim(csv::chomp(line));
        if (stripped.empty() || stripped.front() == '#') continue;
        auto fields = csv::parse_line(stripped);
        if (!fields) fail("malformed CSV row");
        for (auto& f : *fields) f = trim(f);
        if (!header_seen) {
            header_seen = true;
            if (fields->size() != kTraitCount + 1 || (*fields)[0] != "feature")
                fail("expected header 'feature,E,S,A,C,O'");
            for (std::size_t t = 0; t < kTraitCount; ++t)
                if ((*fields)[t + 1] != kTraitCodes[t])
                    fail(fmt::format("unknown trait column '{}' (expected '{}')", (*fields)[t + 1],
                                     kTraitCodes[t]));
            continue;
        }
        if (fields->size() != kTraitCount + 1)
            fail(fmt::format("row has {} cells, expected {}", fields->size(), kTraitCount + 1));
        auto feature = parse_feature((*fields)[0]);
        if (!feature) fail(fmt::format("unknown feature '{}'", (*fields)[0]));
        auto& was_seen = seen[static_cast<std::size_t>(*feature)];
        if (was_seen) fail(fmt::format("duplicate row for feature '{}'", (*fields)[0]));
        was_seen = true;
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            auto sign = parse_sign((*fields)[t + 1]);
            if (!sign)
                fail(fmt::format("feature '{}', trait {}: entry '{}' not in {{-1,0,1}}", (*fields)[0],
                                 kTraitCodes[t], (*fields)[t + 1]));
            matrix.set(*feature, kAllTraits[t], *sign);
        }
    }
    if (!header_seen) throw ConfigError(fmt::format("{}: empty sign matrix", source));
    std::vector<std::string> missing;
    for (auto f : kAllFeatures)
        if (!seen[static_cast<std::size_t>(f)]) missing.emplace_back(to_string(f));
    if (!missing.empty())
        throw ConfigError(fmt::format("{}: missing feature row(s): {}", source, fmt::join(missing, ", ")));
    for (auto t : kAllTraits)
        if (matrix.nonzero_count(t) == 0)
            throw ConfigError(fmt::format("{}: trait column {} has no nonzero entry", source, to_string(t)));
    return matrix;
}

SignMatrix SignMatrix::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open sign matrix '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

const SignMatrix& SignMatrix::defaults() {
    static const SignMatrix matrix =
        parse(detail::embedded_file("signs_default.csv").value(), "signs_default.csv");
    return matrix;
}

CorpusBaseline corpus_baseline(std::span<const FeatureVector> user_means) {
    if (user_means.empty()) throw std::invalid_argument("corpus_baseline: no users");
    CorpusBaseline baseline;
    baseline.population = user_means.size();
    const auto n = static_cast<long double>(user_means.size());
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        // Shifted by the component minimum so equal inputs come back exactly.
        double lo = user_means[0].values[i];
        double hi = lo;
        for (const auto& v : user_means) {
            lo = std::min(lo, v.values[i]);
            hi = std::max(hi, v.values[i]);
        }
        long double excess = 0;
        for (const auto& v : user_means) excess += static_cast<long double>(v.values[i]) - lo;
        const double mean = lo + static_cast<double>(excess / n);
        baseline.means.values[i] = std::clamp(mean, lo, hi);
    }
    return baseline;
}

CorpusBaseline corpus_baseline_per_comment(std::span<const FeatureCounts> user_totals,
                                           std::span<const std::size_t> user_comment_counts) {
    if (user_totals.empty()) throw std::invalid_argument("corpus_baseline_per_comment: no users");
    if (user_totals.size() != user_comment_counts.size())
        throw std::invalid_argument("corpus_baseline_per_comment: size mismatch");
    std::size_t comments = 0;
    for (auto c : user_comment_counts) comments += c;
    if (comments == 0) throw std::invalid_argument("corpus_baseline_per_comment: no comments");
    FeatureCounts sums;
    for (const auto& t : user_totals)
        for (std::size_t i = 0; i < kFeatureCount; ++i) sums.values[i] += t.values[i];
    CorpusBaseline baseline;
    baseline.population = user_totals.size();
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        baseline.means.values[i] = static_cast<double>(sums.values[i]) / static_cast<double>(comments);
    return baseline;
}

TraitScores trait_scores(const FeatureVector& user_means, const CorpusBaseline& baseline,
                         const SignMatrix& matrix) {
    TraitScores scores;
    for (auto f : kAllFeatures) {
        if (!(user_means[f] > baseline.means[f])) continue;
        for (auto t : kAllTraits) scores[t] += matrix.sign(f, t);
    }
    return scores;
}

std::string PersonalityModel::str() const {
    std::string out(kTraitCount, 'o');
    for (std::size_t i = 0; i < kTraitCount; ++i) out[i] = static_cast<char>(labels[i]);
    return out;
}

std::optional<PersonalityModel> PersonalityModel::parse(std::string_view text) {
    if (text.size() != kTraitCount) return std::nullopt;
    PersonalityModel model;
    for (std::size_t i = 0; i < kTraitCount; ++i) {
        switch (text[i]) {
            case 'y': model.labels[i] = Label::y; break;
            case 'n': model.labels[i] = Label::n; break;
            case 'o': model.labels[i] = Label::o; break;
            default: return std::nullopt;
        }
    }
    return model;
}

PersonalityModel to_labels(const TraitScores& scores) {
    PersonalityModel model;
    for (std::size_t i = 0; i < kTraitCount; ++i) {
        const int s = scores.values[i];
        model.labels[i] = s > 0 ? Label::y : (s < 0 ? Label::n : Label::o);
    }
    return model;
}

}  // namespace chamberscope
