// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "chamberscope/personality.hpp"
#include "chamberscope/stats.hpp"

namespace chamberscope::testkit {

struct SynthSpec {
    std::size_t users_per_narrative = 1000;
    std::size_t min_comments = 50;
    std::size_t max_comments = 200;
    PersonalityModel planted = *PersonalityModel::parse("nynny");
    /// Fraction of each chamber carrying the planted model, in [0, 1].
    double prevalence = 0.4;
    std::uint64_t seed = 7;
    std::size_t pages_per_narrative = 4;
};

/// Corpus files in the ingestion formats, plus what was planted.
struct SyntheticCorpus {
    std::string pages_csv;
    std::string comments_jsonl;
    std::string likes_jsonl;
    std::vector<std::string> planted_users;
    /// Features on which planted users sit above the population baseline.
    std::vector<Feature> planted_features;
};

/// Builds a corpus whose planted users score exactly `spec.planted` under
/// `matrix` with the default lexicons and the default per-user baseline,
/// while every other user draws each feature independently above or below
/// the baseline. Every generated user is polarized and has at least
/// spec.min_comments comments. Throws std::invalid_argument for an invalid
/// spec or a planted model the matrix cannot produce.
SyntheticCorpus generate_synthetic_corpus(const SynthSpec& spec,
                                          const SignMatrix& matrix = SignMatrix::defaults());

/// Writes pages.csv, comments.jsonl and likes.jsonl into `directory`.
void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& directory);

/// Exact two-sided Mann-Whitney p by enumerating every assignment of the
/// pooled values to the two samples (ties allowed). n_a + n_b <= 14.
TestResult exact_mann_whitney(std::span<const double> a, std::span<const double> b);

/// Exact one-sided Mantel p over all 120 simultaneous row/column
/// permutations of m2: #{r_perm >= r} / 120.
TestResult exhaustive_mantel(const Matrix5& m1, const Matrix5& m2);

}  // namespace chamberscope::testkit
