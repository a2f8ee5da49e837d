// SPDX-License-Identifier: Apache-2.0
#include "chamberscope/histogram.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace chamberscope {

namespace {

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

constexpr double kWidth = 480, kHeight = 320;
constexpr double kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

}  // namespace

std::vector<HistogramBin> histogram_bins(std::span<const int> values) {
    if (values.empty()) throw std::invalid_argument("histogram: no values");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    std::vector<HistogramBin> bins;
    for (int v = *lo; v <= *hi; ++v) bins.push_back({v, 0});
    for (int v : values) ++bins[static_cast<std::size_t>(v - *lo)].count;
    return bins;
}

std::string histogram_csv(std::span<const HistogramBin> bins) {
    std::string out = "bin_left,bin_right,count\n";
    for (const auto& b : bins) out += fmt::format("{:.1f},{:.1f},{}\n", b.value - 0.5, b.value + 0.5, b.count);
    return out;
}

std::string histogram_svg(std::span<const HistogramBin> bins, std::string_view axis_label,
                          std::string_view title) {
    if (bins.empty()) throw std::invalid_argument("histogram: no bins");
    std::size_t max_count = 0;
    for (const auto& b : bins) max_count = std::max(max_count, b.count);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double bar_w = plot_w / static_cast<double>(bins.size());
    const double base_y = kTop + plot_h;

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
        kWidth, kHeight, kWidth, kHeight);
    svg += fmt::format("  <rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth, kHeight);
    if (!title.empty())
        svg += fmt::format("  <text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                           kLeft + plot_w / 2, xml_escape(title));
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double h = max_count == 0 ? 0.0
                                        : plot_h * static_cast<double>(bins[i].count) / static_cast<double>(max_count);
        const double x = kLeft + bar_w * static_cast<double>(i);
        svg += fmt::format(
            "  <rect class=\"bar\" data-value=\"{}\" data-count=\"{}\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" "
            "height=\"{:.2f}\" fill=\"#4c72b0\" stroke=\"white\"/>\n",
            bins[i].value, bins[i].count, x, base_y - h, bar_w, h);
        svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
                           x + bar_w / 2, base_y + 15, bins[i].value);
    }
    svg += fmt::format("  <line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", kLeft,
                       base_y, kLeft + plot_w, base_y);
    svg += fmt::format("  <line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", kLeft,
                       kTop, kLeft, base_y);
    svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
                       kLeft - 4, kTop + 4, max_count);
    svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"11\">0</text>\n", kLeft - 4,
                       base_y);
    svg += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                       kLeft + plot_w / 2, kHeight - 12, xml_escape(axis_label));
    svg += fmt::format(
        "  <text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 {:.2f})\">"
        "frequency</text>\n",
        kTop + plot_h / 2, kTop + plot_h / 2);
    svg += "</svg>\n";
    return svg;
}

void render_histogram(std::span<const int> values, const std::filesystem::path& out, std::string_view axis_label,
                      std::string_view title) {
    const auto bins = histogram_bins(values);
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error(fmt::format("cannot write '{}'", out.string()));
    file << histogram_svg(bins, axis_label, title);
}

}  // namespace chamberscope
