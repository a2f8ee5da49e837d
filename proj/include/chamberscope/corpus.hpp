// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace chamberscope {

enum class Narrative { science, conspiracy };
enum class Polarization { science, conspiracy, unpolarized };

const char* to_string(Narrative narrative) noexcept;
const char* to_string(Polarization polarization) noexcept;
/// Case-insensitive "science" / "conspiracy".
std::optional<Narrative> parse_narrative(std::string_view text);

struct Page {
    std::string page_id;
    Narrative narrative;
};

struct Comment {
    std::string user_id;
    std::string page_id;
    std::int64_t timestamp;  // UTC seconds
    std::string text;
};

struct LikeRecord {
    std::string user_id;
    std::string page_id;
};

struct UserAggregate {
    std::size_t comment_count = 0;
    std::size_t science_likes = 0;
    std::size_t conspiracy_likes = 0;
    Polarization polarization = Polarization::unpolarized;
    /// Indices into CorpusSnapshot::comments(), in ingestion order.
    std::vector<std::size_t> comment_indices;

    bool operator==(const UserAggregate&) const = default;
};

struct FileReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::map<std::string, std::size_t> reasons;

    void reject(const std::string& reason) {
        ++rejected;
        ++reasons[reason];
    }
};

struct IngestionReport {
    FileReport pages;
    FileReport comments;
    FileReport likes;
};

nlohmann::json to_json(const IngestionReport& report);

inline constexpr double kDefaultPolarizationThreshold = 0.95;
inline constexpr std::size_t kDefaultMinComments = 50;

/// Science iff science share of likes > threshold, Conspiracy iff the
/// conspiracy share is; otherwise (including zero likes) Unpolarized.
/// Throws std::invalid_argument unless threshold is in (0.5, 1].
Polarization classify_polarization(std::size_t science_likes, std::size_t conspiracy_likes,
                                   double threshold = kDefaultPolarizationThreshold);

/// Immutable ingested dataset with per-user aggregates. Users are keyed and
/// iterated in user_id order.
class CorpusSnapshot {
public:
    const std::map<std::string, Page, std::less<>>& pages() const noexcept { return pages_; }
    const std::vector<Comment>& comments() const noexcept { return comments_; }
    const std::vector<LikeRecord>& likes() const noexcept { return likes_; }
    const std::map<std::string, UserAggregate, std::less<>>& users() const noexcept { return users_; }
    double polarization_threshold() const noexcept { return threshold_; }

    const UserAggregate* find_user(std::string_view user_id) const;

    /// Rebuilds the per-user aggregates from the raw lists.
    std::map<std::string, UserAggregate, std::less<>> recompute_aggregates() const;

private:
    friend class CorpusBuilder;

    std::map<std::string, Page, std::less<>> pages_;
    std::vector<Comment> comments_;
    std::vector<LikeRecord> likes_;
    std::map<std::string, UserAggregate, std::less<>> users_;
    double threshold_ = kDefaultPolarizationThreshold;
};

/// Accumulates records with referential checks; add_* return the rejection
/// reason, or nullopt when the record was accepted.
class CorpusBuilder {
public:
    std::optional<std::string> add_page(Page page);
    std::optional<std::string> add_comment(Comment comment);
    std::optional<std::string> add_like(LikeRecord like);

    CorpusSnapshot finish(double threshold = kDefaultPolarizationThreshold) &&;

private:
    CorpusSnapshot snapshot_;
};

struct LoadOptions {
    double polarization_threshold = kDefaultPolarizationThreshold;
    /// Inclusive UTC-second window applied to comment timestamps.
    std::optional<std::int64_t> from;
    std::optional<std::int64_t> to;
};

struct LoadResult {
    CorpusSnapshot snapshot;
    IngestionReport report;
};

/// Reads the pages CSV and the comments/likes JSON-lines files. A missing or
/// unreadable file throws IngestError; bad records are rejected and tallied.
LoadResult load_corpus(const std::filesystem::path& pages_path,
                       const std::filesystem::path& comments_path,
                       const std::filesystem::path& likes_path, const LoadOptions& options = {});

struct EligibleUsers {
    std::vector<std::string> science;
    std::vector<std::string> conspiracy;
};

/// Polarized users with at least min_comments comments, by chamber, sorted.
EligibleUsers eligible_users(const CorpusSnapshot& snapshot,
                             std::size_t min_comments = kDefaultMinComments);

/// Parses ISO-8601 date-times such as "2014-03-02T12:34:56+0000",
/// "2014-03-02T12:34:56Z" or a bare date "2014-03-02" (midnight UTC).
std::optional<std::int64_t> parse_iso8601(std::string_view text);

/// Inverse of parse_iso8601 for UTC, "YYYY-MM-DDTHH:MM:SS+0000".
std::string format_iso8601(std::int64_t seconds);

}  // namespace chamberscope
