// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chamberscope {

struct HistogramBin {
    int value;
    std::size_t count;
};

/// One bin per integer in [min, max] of the input, including empty ones.
/// Throws std::invalid_argument on empty input.
std::vector<HistogramBin> histogram_bins(std::span<const int> values);

/// CSV with header bin_left,bin_right,count; bins are [v - 0.5, v + 0.5).
std::string histogram_csv(std::span<const HistogramBin> bins);

/// Bar chart with bar heights proportional to counts, the x axis labelled
/// with `axis_label` and the y axis with "frequency".
std::string histogram_svg(std::span<const HistogramBin> bins, std::string_view axis_label,
                          std::string_view title);

/// Writes histogram_svg(histogram_bins(values), ...) to `out`.
void render_histogram(std::span<const int> values, const std::filesystem::path& out,
                      std::string_view axis_label, std::string_view title = {});

}  // namespace chamberscope
