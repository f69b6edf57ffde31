#include "log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

#include "gbc/log.hpp"

namespace gbc {

namespace {

spdlog::level::level_enum level_from_env() {
  const char* env = std::getenv("GB_LOG");
  if (env == nullptr) return spdlog::level::warn;
  const std::string_view v(env);
  if (v == "debug") return spdlog::level::debug;
  if (v == "info") return spdlog::level::info;
  if (v == "warn") return spdlog::level::warn;
  if (v == "error") return spdlog::level::err;
  if (v == "off") return spdlog::level::off;
  return spdlog::level::warn;
}

}  // namespace

namespace detail {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::stderr_logger_st("gbc");
    l->set_pattern("[%l] %v");
    l->set_level(level_from_env());
    return l;
  }();
  return instance;
}

}  // namespace detail

void set_log_level(std::string_view level) {
  auto l = detail::logger();
  if (level == "debug") {
    l->set_level(spdlog::level::debug);
  } else if (level == "info") {
    l->set_level(spdlog::level::info);
  } else if (level == "warn") {
    l->set_level(spdlog::level::warn);
  } else if (level == "off") {
    l->set_level(spdlog::level::off);
  }
}

void log_info(std::string_view message) { detail::logger()->info("{}", message); }

}  // namespace gbc
