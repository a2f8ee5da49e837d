// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chamberscope/lexical.hpp>
#include <chamberscope/stats.hpp>

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chamberscope::test {

inline const std::filesystem::path kTestDataDir = CHAMBERSCOPE_TEST_DATA_DIR;
inline const std::filesystem::path kSourceDataDir = CHAMBERSCOPE_SOURCE_DATA_DIR;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view body);

struct GoldenRow {
    std::string text;
    FeatureCounts expected;
};

/// Hand-counted feature rows; columns are `text` then the 18 feature codes.
std::vector<GoldenRow> load_golden(const std::filesystem::path& path = kTestDataDir / "golden_features.csv");

/// Builds corpus files record by record.
class CorpusFiles {
public:
    CorpusFiles& page(std::string_view id, std::string_view narrative);
    CorpusFiles& comments(std::string_view user, std::string_view page, std::size_t n,
                          std::string_view text = "hello there");
    CorpusFiles& likes(std::string_view user, std::string_view page, std::size_t n);
    CorpusFiles& raw_comment_line(std::string_view line);
    CorpusFiles& raw_like_line(std::string_view line);

    struct Paths {
        std::filesystem::path pages, comments, likes;
    };
    Paths write(const std::filesystem::path& directory) const;

private:
    std::string pages_ = "page_id,narrative\n";
    std::string comments_;
    std::string likes_;
    std::size_t serial_ = 0;
};

/// Two-pass Pearson in long double; nullopt on zero variance.
std::optional<double> naive_pearson(std::span<const double> x, std::span<const double> y);

/// Symmetric 5x5 matrix, unit diagonal, off-diagonal uniform in [-1, 1].
Matrix5 random_symmetric(std::mt19937_64& rng);

/// Distinct values drawn from a shuffled integer range, split into two
/// samples of the given sizes.
std::pair<std::vector<double>, std::vector<double>> tie_free_samples(std::mt19937_64& rng, std::size_t na,
                                                                     std::size_t nb);

std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi);

}  // namespace chamberscope::test
