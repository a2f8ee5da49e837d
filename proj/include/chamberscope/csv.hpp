// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chamberscope::csv {

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
/// Returns nullopt on an unterminated quote or stray characters after a
/// closing quote.
std::optional<std::vector<std::string>> parse_line(std::string_view line);

/// Quotes a field if it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Strips a trailing '\r' left by CRLF files.
std::string_view chomp(std::string_view line);

}  // namespace chamberscope::csv
