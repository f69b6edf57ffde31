#pragma once

#include <string_view>

namespace gbc {

/// Overrides the GB_LOG environment setting: "debug", "info", "warn" or "off".
void set_log_level(std::string_view level);

void log_info(std::string_view message);

}  // namespace gbc
