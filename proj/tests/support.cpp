// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <chamberscope/csv.hpp>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace chamberscope::test {

namespace fs = std::filesystem;

TempDir::TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            fmt::format("chamberscope-test-{}-{}", static_cast<long>(::getpid()), counter++);
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<GoldenRow> load_golden(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    const auto header = csv::parse_line(csv::chomp(line));
    if (!header || header->size() != kFeatureCount + 1 || (*header)[0] != "text")
        throw std::runtime_error("golden file: bad header");
    std::vector<Feature> columns;
    for (std::size_t i = 1; i < header->size(); ++i) {
        auto f = parse_feature((*header)[i]);
        if (!f) throw std::runtime_error("golden file: unknown feature " + (*header)[i]);
        columns.push_back(*f);
    }
    std::vector<GoldenRow> rows;
    while (std::getline(in, line)) {
        auto fields = csv::parse_line(csv::chomp(line));
        if (!fields || fields->size() != columns.size() + 1)
            throw std::runtime_error("golden file: malformed row: " + line);
        GoldenRow row{(*fields)[0], {}};
        for (std::size_t i = 0; i < columns.size(); ++i) row.expected[columns[i]] = std::stoll((*fields)[i + 1]);
        rows.push_back(std::move(row));
    }
    return rows;
}

CorpusFiles& CorpusFiles::page(std::string_view id, std::string_view narrative) {
    pages_ += fmt::format("{},{}\n", id, narrative);
    return *this;
}

CorpusFiles& CorpusFiles::comments(std::string_view user, std::string_view page, std::size_t n,
                                   std::string_view text) {
    for (std::size_t i = 0; i < n; ++i) {
        // Spread timestamps over 2012 so every record parses and stays distinct.
        const auto day = 1 + (serial_ % 28);
        const auto second = serial_ % 60;
        ++serial_;
        comments_ += nlohmann::json{{"user_id", user},
                                    {"page_id", page},
                                    {"created_time", fmt::format("2012-03-{:02}T10:00:{:02}+0000", day, second)},
                                    {"message", text}}
                         .dump();
        comments_ += '\n';
    }
    return *this;
}

CorpusFiles& CorpusFiles::likes(std::string_view user, std::string_view page, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        likes_ += nlohmann::json{{"user_id", user}, {"page_id", page}}.dump() + "\n";
    return *this;
}

CorpusFiles& CorpusFiles::raw_comment_line(std::string_view line) {
    comments_.append(line).push_back('\n');
    return *this;
}

CorpusFiles& CorpusFiles::raw_like_line(std::string_view line) {
    likes_.append(line).push_back('\n');
    return *this;
}

CorpusFiles::Paths CorpusFiles::write(const fs::path& directory) const {
    Paths paths{directory / "pages.csv", directory / "comments.jsonl", directory / "likes.jsonl"};
    write_file(paths.pages, pages_);
    write_file(paths.comments, comments_);
    write_file(paths.likes, likes_);
    return paths;
}

std::optional<double> naive_pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<long double>(x.size());
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

Matrix5 random_symmetric(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix5 m{};
    for (std::size_t i = 0; i < kTraitCount; ++i) {
        m[i][i] = 1.0;
        for (std::size_t j = i + 1; j < kTraitCount; ++j) m[i][j] = m[j][i] = unit(rng);
    }
    return m;
}

std::pair<std::vector<double>, std::vector<double>> tie_free_samples(std::mt19937_64& rng, std::size_t na,
                                                                     std::size_t nb) {
    std::vector<int> pool(100);
    std::iota(pool.begin(), pool.end(), -50);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<double> a(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(na));
    std::vector<double> b(pool.begin() + static_cast<std::ptrdiff_t>(na),
                          pool.begin() + static_cast<std::ptrdiff_t>(na + nb));
    return {std::move(a), std::move(b)};
}

std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace chamberscope::test
