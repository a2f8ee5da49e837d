// SPDX-License-Identifier: Apache-2.0
#include "chamberscope/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "chamberscope/csv.hpp"
#include "chamberscope/error.hpp"

namespace chamberscope {

namespace {

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::ifstream open_or_throw(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(fmt::format("cannot open {} file '{}'", what, path.string()));
    return in;
}

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    auto sub = text.substr(pos, len);
    if (!std::all_of(sub.begin(), sub.end(), [](unsigned char c) { return std::isdigit(c); })) return false;
    auto [ptr, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), out);
    return ec == std::errc() && ptr == sub.data() + sub.size();
}

const nlohmann::json* string_field(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return nullptr;
    return &*it;
}

nlohmann::json to_json(const FileReport& report) {
    nlohmann::json reasons = nlohmann::json::object();
    for (const auto& [reason, count] : report.reasons) reasons[reason] = count;
    return {{"accepted", report.accepted}, {"rejected", report.rejected}, {"reasons", reasons}};
}

}  // namespace

const char* to_string(Narrative narrative) noexcept {
    return narrative == Narrative::science ? "science" : "conspiracy";
}

const char* to_string(Polarization polarization) noexcept {
    switch (polarization) {
        case Polarization::science: return "science";
        case Polarization::conspiracy: return "conspiracy";
        case Polarization::unpolarized: return "unpolarized";
    }
    return "unpolarized";
}

std::optional<Narrative> parse_narrative(std::string_view text) {
    auto lower = lowercase(trim(text));
    if (lower == "science") return Narrative::science;
    if (lower == "conspiracy") return Narrative::conspiracy;
    return std::nullopt;
}

nlohmann::json to_json(const IngestionReport& report) {
    return {{"pages", to_json(report.pages)},
            {"comments", to_json(report.comments)},
            {"likes", to_json(report.likes)}};
}

Polarization classify_polarization(std::size_t science_likes, std::size_t conspiracy_likes,
                                   double threshold) {
    if (!(threshold > 0.5 && threshold <= 1.0))
        throw std::invalid_argument(fmt::format("polarization threshold {} not in (0.5, 1]", threshold));
    const std::size_t total = science_likes + conspiracy_likes;
    if (total == 0) return Polarization::unpolarized;
    const double denom = static_cast<double>(total);
    if (static_cast<double>(science_likes) / denom > threshold) return Polarization::science;
    if (static_cast<double>(conspiracy_likes) / denom > threshold) return Polarization::conspiracy;
    return Polarization::unpolarized;
}

const UserAggregate* CorpusSnapshot::find_user(std::string_view user_id) const {
    auto it = users_.find(user_id);
    return it == users_.end() ? nullptr : &it->second;
}

std::map<std::string, UserAggregate, std::less<>> CorpusSnapshot::recompute_aggregates() const {
    std::map<std::string, UserAggregate, std::less<>> users;
    for (std::size_t i = 0; i < comments_.size(); ++i) {
        auto& agg = users[comments_[i].user_id];
        ++agg.comment_count;
        agg.comment_indices.push_back(i);
    }
    for (const auto& like : likes_) {
        auto& agg = users[like.user_id];
        if (pages_.at(like.page_id).narrative == Narrative::science)
            ++agg.science_likes;
        else
            ++agg.conspiracy_likes;
    }
    for (auto& [id, agg] : users)
        agg.polarization = classify_polarization(agg.science_likes, agg.conspiracy_likes, threshold_);
    return users;
}

std::optional<std::string> CorpusBuilder::add_page(Page page) {
    if (page.page_id.empty()) return "empty_page_id";
    if (snapshot_.pages_.count(page.page_id)) return "duplicate_page_id";
    auto id = page.page_id;
    snapshot_.pages_.emplace(std::move(id), std::move(page));
    return std::nullopt;
}

std::optional<std::string> CorpusBuilder::add_comment(Comment comment) {
    if (comment.user_id.empty()) return "empty_user_id";
    if (!snapshot_.pages_.count(comment.page_id)) return "unknown_page";
    snapshot_.comments_.push_back(std::move(comment));
    return std::nullopt;
}

std::optional<std::string> CorpusBuilder::add_like(LikeRecord like) {
    if (like.user_id.empty()) return "empty_user_id";
    if (!snapshot_.pages_.count(like.page_id)) return "unknown_page";
    snapshot_.likes_.push_back(std::move(like));
    return std::nullopt;
}

CorpusSnapshot CorpusBuilder::finish(double threshold) && {
    // Validates the threshold before any aggregation.
    classify_polarization(0, 0, threshold);
    snapshot_.threshold_ = threshold;
    snapshot_.users_ = snapshot_.recompute_aggregates();
    return std::move(snapshot_);
}

LoadResult load_corpus(const std::filesystem::path& pages_path,
                       const std::filesystem::path& comments_path,
                       const std::filesystem::path& likes_path, const LoadOptions& options) {
    auto pages_in = open_or_throw(pages_path, "pages");
    auto comments_in = open_or_throw(comments_path, "comments");
    auto likes_in = open_or_throw(likes_path, "likes");

    CorpusBuilder builder;
    IngestionReport report;
    std::string line;

    bool header_seen = false;
    while (std::getline(pages_in, line)) {
        auto view = csv::chomp(line);
        if (trim(view).empty()) continue;
        auto fields = csv::parse_line(view);
        if (!header_seen) {
            header_seen = true;
            if (!fields || fields->size() != 2 || lowercase(trim((*fields)[0])) != "page_id" ||
                lowercase(trim((*fields)[1])) != "narrative")
                throw IngestError(fmt::format("pages file '{}': expected header 'page_id,narrative'",
                                              pages_path.string()));
            continue;
        }
        if (!fields || fields->size() != 2) {
            report.pages.reject("malformed_row");
            continue;
        }
        auto narrative = parse_narrative((*fields)[1]);
        if (!narrative) {
            report.pages.reject("unknown_narrative");
            continue;
        }
        if (auto reason = builder.add_page({std::string(trim((*fields)[0])), *narrative}))
            report.pages.reject(*reason);
        else
            ++report.pages.accepted;
    }
    if (!header_seen)
        throw IngestError(fmt::format("pages file '{}' is empty", pages_path.string()));

    while (std::getline(comments_in, line)) {
        auto view = csv::chomp(line);
        if (trim(view).empty()) continue;
        auto obj = nlohmann::json::parse(view, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            report.comments.reject("malformed_json");
            continue;
        }
        const auto* user = string_field(obj, "user_id");
        const auto* page = string_field(obj, "page_id");
        const auto* created = string_field(obj, "created_time");
        const auto* message = string_field(obj, "message");
        if (!user || !page || !created || !message) {
            report.comments.reject("missing_field");
            continue;
        }
        auto timestamp = parse_iso8601(created->get_ref<const std::string&>());
        if (!timestamp) {
            report.comments.reject("bad_timestamp");
            continue;
        }
        if ((options.from && *timestamp < *options.from) || (options.to && *timestamp > *options.to)) {
            report.comments.reject("outside_date_window");
            continue;
        }
        Comment comment{user->get<std::string>(), page->get<std::string>(), *timestamp,
                        message->get<std::string>()};
        if (auto reason = builder.add_comment(std::move(comment)))
            report.comments.reject(*reason);
        else
            ++report.comments.accepted;
    }

    while (std::getline(likes_in, line)) {
        auto view = csv::chomp(line);
        if (trim(view).empty()) continue;
        auto obj = nlohmann::json::parse(view, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            report.likes.reject("malformed_json");
            continue;
        }
        const auto* user = string_field(obj, "user_id");
        const auto* page = string_field(obj, "page_id");
        if (!user || !page) {
            report.likes.reject("missing_field");
            continue;
        }
        if (auto reason = builder.add_like({user->get<std::string>(), page->get<std::string>()}))
            report.likes.reject(*reason);
        else
            ++report.likes.accepted;
    }

    CorpusSnapshot snapshot;
    try {
        snapshot = std::move(builder).finish(options.polarization_threshold);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return {std::move(snapshot), std::move(report)};
}

EligibleUsers eligible_users(const CorpusSnapshot& snapshot, std::size_t min_comments) {
    if (min_comments < 1) throw std::invalid_argument("min_comments must be at least 1");
    EligibleUsers out;
    for (const auto& [id, agg] : snapshot.users()) {
        if (agg.comment_count < min_comments) continue;
        if (agg.polarization == Polarization::science)
            out.science.push_back(id);
        else if (agg.polarization == Polarization::conspiracy)
            out.conspiracy.push_back(id);
    }
    return out;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    text = trim(text);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || !read_int(text, 5, 2, mo) ||
        text[7] != '-' || !read_int(text, 8, 2, d))
        return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    std::int64_t offset = 0;
    std::size_t pos = 10;
    if (pos < text.size()) {
        if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
        if (!read_int(text, pos + 1, 2, h) || text.size() < pos + 9 || text[pos + 3] != ':' ||
            !read_int(text, pos + 4, 2, mi) || text[pos + 6] != ':' || !read_int(text, pos + 7, 2, s))
            return std::nullopt;
        if (h > 23 || mi > 59 || s > 60) return std::nullopt;
        pos += 9;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            const std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == start) return std::nullopt;
        }
        if (pos < text.size()) {
            if (text[pos] == 'Z' && pos + 1 == text.size()) {
                pos = text.size();
            } else if (text[pos] == '+' || text[pos] == '-') {
                const int sign = text[pos] == '+' ? 1 : -1;
                int oh = 0, om = 0;
                auto rest = text.substr(pos + 1);
                if (rest.size() == 4 && read_int(rest, 0, 2, oh) && read_int(rest, 2, 2, om)) {
                } else if (rest.size() == 5 && rest[2] == ':' && read_int(rest, 0, 2, oh) &&
                           read_int(rest, 3, 2, om)) {
                } else {
                    return std::nullopt;
                }
                if (oh > 23 || om > 59) return std::nullopt;
                offset = sign * (oh * 3600 + om * 60);
                pos = text.size();
            } else {
                return std::nullopt;
            }
        }
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + s - offset;
}

std::string format_iso8601(std::int64_t seconds) {
    using namespace std::chrono;
    auto days_since = seconds >= 0 ? seconds / 86400 : (seconds - 86399) / 86400;
    const std::int64_t rem = seconds - days_since * 86400;
    const year_month_day ymd{sys_days{days{days_since}}};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}+0000", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                       rem / 3600, (rem % 3600) / 60, rem % 60);
}

}  // namespace chamberscope
