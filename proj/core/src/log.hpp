#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace gbc::detail {

/// Shared "gbc" logger writing to stderr; level taken from GB_LOG
/// (debug|info|warn, default warn).
std::shared_ptr<spdlog::logger> logger();

}  // namespace gbc::detail
