// SPDX-License-Identifier: Apache-2.0
#include "chamberscope/stats.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "chamberscope/random.hpp"

namespace chamberscope {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RankInfo {
    std::int64_t twice_rank_sum_a = 0;  // 2 * R_a, exact with average ranks
    double tie_term = 0.0;              // sum of t^3 - t over tie groups
    bool has_ties = false;
};

RankInfo rank_samples(std::span<const double> a, std::span<const double> b) {
    std::vector<std::pair<double, bool>> pooled;
    pooled.reserve(a.size() + b.size());
    for (double v : a) pooled.emplace_back(v, true);
    for (double v : b) pooled.emplace_back(v, false);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    RankInfo info;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j + 1 < pooled.size() && pooled[j + 1].first == pooled[i].first) ++j;
        // 1-based ranks i+1 .. j+1 share the average (i+j+2)/2.
        const auto twice_rank = static_cast<std::int64_t>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k)
            if (pooled[k].second) info.twice_rank_sum_a += twice_rank;
        const auto t = static_cast<double>(j - i + 1);
        if (j > i) {
            info.has_ties = true;
            info.tie_term += t * t * t - t;
        }
        i = j + 1;
    }
    return info;
}

void require_samples(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
}

std::int64_t twice_u(std::span<const double> a, const RankInfo& info) {
    const auto na = static_cast<std::int64_t>(a.size());
    return info.twice_rank_sum_a - na * (na + 1);
}

// Number of labelings giving each U, by dynamic programming over the
// sorted pooled sequence: an 'a' placed after m-k 'b's adds m-k to U.
std::vector<std::uint64_t> u_distribution(std::size_t na, std::size_t nb) {
    const std::size_t umax = na * nb;
    std::vector<std::vector<std::uint64_t>> dp(na + 1, std::vector<std::uint64_t>(umax + 1, 0));
    dp[0][0] = 1;
    for (std::size_t m = 0; m < na + nb; ++m) {
        for (std::size_t k = std::min(na, m + 1); k-- > 0;) {
            if (m < k || m - k > nb) continue;
            const std::size_t gain = m - k;
            for (std::size_t u = umax + 1; u-- > 0;) {
                if (dp[k][u] == 0 || u + gain > umax) continue;
                dp[k + 1][u + gain] += dp[k][u];
            }
        }
    }
    return dp[na];
}

double standard_normal_two_sided(double z) { return std::erfc(z / std::sqrt(2.0)); }

}  // namespace

Descriptive descriptive(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("descriptive: sd undefined for fewer than 2 values");
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

const char* to_string(TestMethod method) noexcept {
    switch (method) {
        case TestMethod::exact: return "exact";
        case TestMethod::normal_approx: return "normal-approx";
        case TestMethod::permutation: return "permutation";
    }
    return "exact";
}

double mann_whitney_statistic(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    return static_cast<double>(twice_u(a, rank_samples(a, b))) / 2.0;
}

TestResult mann_whitney_exact(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    if (a.size() * b.size() > kMannWhitneyExactLimit)
        throw std::invalid_argument("mann_whitney_exact: n_a * n_b exceeds 400");
    const auto info = rank_samples(a, b);
    if (info.has_ties) throw std::invalid_argument("mann_whitney_exact: samples contain ties");
    const auto u = static_cast<std::size_t>(twice_u(a, info) / 2);
    const auto dist = u_distribution(a.size(), b.size());
    std::uint64_t lo = 0, hi = 0, total = 0;
    for (std::size_t v = 0; v < dist.size(); ++v) {
        total += dist[v];
        if (v <= u) lo += dist[v];
        if (v >= u) hi += dist[v];
    }
    TestResult result;
    result.statistic = static_cast<double>(u);
    result.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(lo, hi)) / static_cast<double>(total));
    result.method = TestMethod::exact;
    return result;
}

TestResult mann_whitney_normal(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const auto info = rank_samples(a, b);
    const double u = static_cast<double>(twice_u(a, info)) / 2.0;
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    const double n = na + nb;
    const double mean = na * nb / 2.0;
    const double variance = n > 1.0 ? na * nb / 12.0 * ((n + 1.0) - info.tie_term / (n * (n - 1.0))) : 0.0;
    TestResult result;
    result.statistic = u;
    result.method = TestMethod::normal_approx;
    if (variance <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(variance);
    result.p_value = std::clamp(standard_normal_two_sided(z), 0.0, 1.0);
    return result;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    if (a.size() * b.size() <= kMannWhitneyExactLimit && !rank_samples(a, b).has_ties)
        return mann_whitney_exact(a, b);
    return mann_whitney_normal(a, b);
}

std::optional<double> try_pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 observations");
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    bool x_constant = true, y_constant = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x_constant = x_constant && x[i] == x[0];
        y_constant = y_constant && y[i] == y[0];
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (x_constant || y_constant || sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    auto r = try_pearson(x, y);
    if (!r) throw UndefinedCorrelation("pearson: constant input, correlation undefined");
    return *r;
}

bool CorrMatrix::complete() const noexcept {
    return std::all_of(defined.begin(), defined.end(), [](bool d) { return d; });
}

std::vector<double> GroupScores::trait_values(Trait trait) const {
    std::vector<double> out;
    out.reserve(users.size());
    for (const auto& u : users) out.push_back(u.scores[trait]);
    return out;
}

std::vector<double> GroupScores::comment_counts() const {
    std::vector<double> out;
    out.reserve(users.size());
    for (const auto& u : users) out.push_back(static_cast<double>(u.comment_count));
    return out;
}

CorrMatrix trait_correlation_matrix(const GroupScores& group) {
    if (group.users.size() < 2) throw std::invalid_argument("trait_correlation_matrix: need at least 2 users");
    std::array<std::vector<double>, kTraitCount> columns;
    CorrMatrix m;
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        columns[t] = group.trait_values(kAllTraits[t]);
        m.defined[t] = std::any_of(columns[t].begin(), columns[t].end(),
                                   [&](double v) { return v != columns[t][0]; });
    }
    for (std::size_t i = 0; i < kTraitCount; ++i) {
        for (std::size_t j = 0; j < kTraitCount; ++j) {
            if (!m.defined[i] || !m.defined[j]) {
                m.values[i][j] = kNaN;
            } else if (i == j) {
                m.values[i][j] = 1.0;
            } else if (j < i) {
                m.values[i][j] = m.values[j][i];
            } else {
                m.values[i][j] = pearson(columns[i], columns[j]);
            }
        }
    }
    return m;
}

std::optional<double> mantel_statistic(const Matrix5& m1, const Matrix5& m2) {
    std::vector<double> x, y;
    x.reserve(10);
    y.reserve(10);
    for (std::size_t i = 0; i < kTraitCount; ++i)
        for (std::size_t j = i + 1; j < kTraitCount; ++j) {
            x.push_back(m1[i][j]);
            y.push_back(m2[i][j]);
        }
    return try_pearson(x, y);
}

Matrix5 permute(const Matrix5& m, const std::array<std::size_t, kTraitCount>& p) {
    Matrix5 out{};
    for (std::size_t i = 0; i < kTraitCount; ++i)
        for (std::size_t j = 0; j < kTraitCount; ++j) out[i][j] = m[p[i]][p[j]];
    return out;
}

TestResult mantel(const Matrix5& m1, const Matrix5& m2, std::size_t replicates, std::uint64_t seed,
                  unsigned threads) {
    if (replicates == 0) throw std::invalid_argument("mantel: replicates must be at least 1");
    for (const auto* m : {&m1, &m2})
        for (std::size_t i = 0; i < kTraitCount; ++i)
            for (std::size_t j = i + 1; j < kTraitCount; ++j)
                if (!(std::abs((*m)[i][j] - (*m)[j][i]) <= 1e-12))
                    throw std::invalid_argument(fmt::format("mantel: matrix not symmetric at ({}, {})", i, j));

    TestResult result;
    result.method = TestMethod::permutation;
    result.replicates = replicates;
    result.seed = seed;
    const auto observed = mantel_statistic(m1, m2);
    if (!observed) {
        result.applicable = false;
        result.statistic = kNaN;
        result.p_value = 1.0;
        return result;
    }
    result.statistic = *observed;

    auto count_range = [&](std::size_t begin, std::size_t end) {
        std::size_t hits = 0;
        for (std::size_t k = begin; k < end; ++k) {
            SplitMix64 gen(substream_seed(seed, k));
            std::array<std::size_t, kTraitCount> p{0, 1, 2, 3, 4};
            shuffle(std::span<std::size_t>(p), gen);
            const auto r = mantel_statistic(m1, permute(m2, p));
            if (r && *r >= *observed - kMantelTieTolerance) ++hits;
        }
        return hits;
    };

    std::size_t hits = 0;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replicates)));
    if (threads == 1) {
        hits = count_range(0, replicates);
    } else {
        std::vector<std::future<std::size_t>> parts;
        const std::size_t chunk = (replicates + threads - 1) / threads;
        for (std::size_t begin = 0; begin < replicates; begin += chunk)
            parts.push_back(std::async(std::launch::async, count_range, begin, std::min(replicates, begin + chunk)));
        for (auto& part : parts) hits += part.get();
    }
    result.p_value = static_cast<double>(hits + 1) / static_cast<double>(replicates + 1);
    return result;
}

std::vector<PmShare> pm_ranking(const GroupScores& group) {
    if (group.users.empty()) throw std::invalid_argument("pm_ranking: empty group");
    std::map<PersonalityModel, std::size_t> counts;
    for (const auto& u : group.users) ++counts[u.model];
    std::vector<PmShare> ranking;
    ranking.reserve(counts.size());
    const auto n = static_cast<double>(group.users.size());
    for (const auto& [model, count] : counts)
        ranking.push_back({model, count, 100.0 * static_cast<double>(count) / n});
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const PmShare& x, const PmShare& y) { return x.count > y.count; });
    return ranking;
}

std::array<std::optional<double>, kTraitCount> activity_trait_correlation(const GroupScores& group) {
    if (group.users.size() < 2) throw std::invalid_argument("activity_trait_correlation: need at least 2 users");
    const auto counts = group.comment_counts();
    std::array<std::optional<double>, kTraitCount> out;
    for (std::size_t t = 0; t < kTraitCount; ++t) out[t] = try_pearson(counts, group.trait_values(kAllTraits[t]));
    return out;
}

}  // namespace chamberscope
