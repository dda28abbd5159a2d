#include "immunorec/logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "immunorec/errors.hpp"

namespace immunorec {

void set_log_level(std::string_view level) {
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown log level '" + std::string(level) + "'");
  }
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("immunorec");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("IMMUNOREC_LOG");
  set_log_level(env != nullptr && *env != '\0' ? env : "warn");
}

}  // namespace immunorec
