// SPDX-License-Identifier: Apache-2.0
#include "chamberscope/error.hpp"

namespace chamberscope {

const char* to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::config: return "config";
        case Stage::ingest: return "ingest";
        case Stage::features: return "features";
        case Stage::baseline: return "baseline";
        case Stage::scoring: return "scoring";
        case Stage::stats: return "stats";
        case Stage::output: return "output";
    }
    return "unknown";
}

}  // namespace chamberscope
