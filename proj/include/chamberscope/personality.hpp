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

#include "chamberscope/lexical.hpp"

namespace chamberscope {

/// Big Five traits in label order: extraversion, emotional stability,
/// agreeableness, conscientiousness, openness.
enum class Trait : std::uint8_t { E, S, A, C, O };

inline constexpr std::size_t kTraitCount = 5;
inline constexpr std::array<Trait, kTraitCount> kAllTraits = {Trait::E, Trait::S, Trait::A, Trait::C,
                                                              Trait::O};

std::string_view to_string(Trait trait) noexcept;
std::string_view trait_name(Trait trait) noexcept;

/// Feature -> trait correlation signs in {-1, 0, +1}.
class SignMatrix {
public:
    int sign(Feature feature, Trait trait) const noexcept {
        return cells_[static_cast<std::size_t>(feature)][static_cast<std::size_t>(trait)];
    }
    /// Throws std::invalid_argument unless sign is -1, 0 or 1.
    void set(Feature feature, Trait trait, int sign);
    std::size_t nonzero_count(Trait trait) const noexcept;

    /// Parses the `feature,E,S,A,C,O` CSV. Blank lines and '#' comments are
    /// skipped. Throws ConfigError naming the offending row or column.
    static SignMatrix parse(std::string_view body, std::string_view source = "sign matrix");
    static SignMatrix load(const std::filesystem::path& path);
    /// The shipped data/signs_default.csv.
    static const SignMatrix& defaults();

    bool operator==(const SignMatrix&) const = default;

private:
    std::array<std::array<std::int8_t, kTraitCount>, kFeatureCount> cells_{};
};

struct CorpusBaseline {
    FeatureVector means;
    std::size_t population = 0;
};

/// Mean of per-user mean vectors, each user weighted equally. Identical
/// inputs reproduce the input exactly. Throws std::invalid_argument when empty.
CorpusBaseline corpus_baseline(std::span<const FeatureVector> user_means);

/// Global per-comment mean: all users' feature totals over all their
/// comments. population is the number of users.
CorpusBaseline corpus_baseline_per_comment(std::span<const FeatureCounts> user_totals,
                                           std::span<const std::size_t> user_comment_counts);

struct TraitScores {
    std::array<int, kTraitCount> values{};

    int& operator[](Trait t) noexcept { return values[static_cast<std::size_t>(t)]; }
    int operator[](Trait t) const noexcept { return values[static_cast<std::size_t>(t)]; }
    bool operator==(const TraitScores&) const = default;
};

/// score(t) = sum over features f with user_means[f] > baseline[f] of sign(f, t).
TraitScores trait_scores(const FeatureVector& user_means, const CorpusBaseline& baseline,
                         const SignMatrix& matrix);

enum class Label : char { y = 'y', n = 'n', o = 'o' };

/// Five labels in E,S,A,C,O order, e.g. "nynny".
struct PersonalityModel {
    std::array<Label, kTraitCount> labels{Label::o, Label::o, Label::o, Label::o, Label::o};

    std::string str() const;
    static std::optional<PersonalityModel> parse(std::string_view text);

    auto operator<=>(const PersonalityModel&) const = default;
};

inline constexpr std::size_t kPersonalityModelCount = 243;

PersonalityModel to_labels(const TraitScores& scores);

}  // namespace chamberscope
