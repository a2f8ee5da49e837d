// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chamberscope/personality.hpp"

namespace chamberscope {

/// Raised when a correlation is undefined because an input has zero variance.
class UndefinedCorrelation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Descriptive {
    double mean;
    double sd;  // sample standard deviation, n - 1 denominator
};

/// Throws std::invalid_argument for fewer than two values.
Descriptive descriptive(std::span<const double> values);

enum class TestMethod { exact, normal_approx, permutation };

const char* to_string(TestMethod method) noexcept;

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::exact;
    std::size_t replicates = 0;
    std::optional<std::uint64_t> seed;
    /// False when the statistic is undefined (e.g. zero variance); the
    /// statistic is then NaN and p_value 1.
    bool applicable = true;
};

/// U statistic of sample a with average ranks for ties.
double mann_whitney_statistic(std::span<const double> a, std::span<const double> b);

/// Two-sided Mann-Whitney U test. Uses the exact null distribution when
/// n_a * n_b <= 400 and there are no ties, otherwise the tie-corrected normal
/// approximation with continuity correction. Throws std::invalid_argument on
/// an empty sample.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Exact path only. Throws std::invalid_argument on ties or when
/// n_a * n_b > 400.
TestResult mann_whitney_exact(std::span<const double> a, std::span<const double> b);

/// Normal approximation only.
TestResult mann_whitney_normal(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kMannWhitneyExactLimit = 400;

/// Pearson correlation, clamped to [-1, 1]. Throws std::invalid_argument on
/// mismatched or too-short inputs and UndefinedCorrelation when either input
/// is constant.
double pearson(std::span<const double> x, std::span<const double> y);
/// As pearson, but returns nullopt where the coefficient is undefined.
std::optional<double> try_pearson(std::span<const double> x, std::span<const double> y);

using Matrix5 = std::array<std::array<double, kTraitCount>, kTraitCount>;

struct CorrMatrix {
    Matrix5 values{};
    /// False for traits that are constant across the group; their rows and
    /// columns are not applicable (NaN).
    std::array<bool, kTraitCount> defined{};

    bool complete() const noexcept;
};

struct ScoredUser {
    std::string user_id;
    TraitScores scores;
    std::size_t comment_count = 0;
    PersonalityModel model;
};

struct GroupScores {
    std::string narrative;
    std::vector<ScoredUser> users;

    std::vector<double> trait_values(Trait trait) const;
    std::vector<double> comment_counts() const;
};

/// Pairwise Pearson over the users' five trait scores. Throws
/// std::invalid_argument for fewer than two users.
CorrMatrix trait_correlation_matrix(const GroupScores& group);

inline constexpr std::size_t kDefaultMantelReplicates = 10000;
/// Permuted statistics within this distance of the observed one count as
/// "at least as large".
inline constexpr double kMantelTieTolerance = 1e-12;

/// Pearson over the ten upper-triangle off-diagonal entries; nullopt when
/// either triangle is constant.
std::optional<double> mantel_statistic(const Matrix5& m1, const Matrix5& m2);

/// Applies a simultaneous row/column permutation: out[i][j] = m[p[i]][p[j]].
Matrix5 permute(const Matrix5& m, const std::array<std::size_t, kTraitCount>& p);

/// One-sided Mantel permutation test. Replicate k permutes m2 with a
/// generator seeded from (seed, k); p = (#{r_k >= r} + 1) / (replicates + 1).
/// The result does not depend on `threads`. Throws std::invalid_argument on
/// asymmetric input or zero replicates.
TestResult mantel(const Matrix5& m1, const Matrix5& m2, std::size_t replicates = kDefaultMantelReplicates,
                  std::uint64_t seed = 0, unsigned threads = 1);

struct PmShare {
    PersonalityModel model;
    std::size_t count = 0;
    double percentage = 0.0;
};

/// Observed personality models by descending frequency, ties broken by the
/// model string. Throws std::invalid_argument on an empty group.
std::vector<PmShare> pm_ranking(const GroupScores& group);

/// Pearson between comment count and each trait, E,S,A,C,O; nullopt where
/// undefined. Throws std::invalid_argument for fewer than two users.
std::array<std::optional<double>, kTraitCount> activity_trait_correlation(const GroupScores& group);

}  // namespace chamberscope
