#pragma once

#include <iostream>
#include <string_view>

namespace rnr {

// All non-fatal diagnostics funnel through here; stderr keeps stdout clean
// for machine-readable output.
inline void log_warning(std::string_view message) {
    std::cerr << "warning: " << message << '\n';
}

}  // namespace rnr
