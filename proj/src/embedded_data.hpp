// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

namespace chamberscope::detail {

/// Default data files compiled into the library, keyed by file name
/// ("signs_default.csv", "pronouns_im.txt", ...).
std::optional<std::string_view> embedded_file(std::string_view name);

}  // namespace chamberscope::detail
