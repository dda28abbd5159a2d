#pragma once

#include <string_view>

namespace immunorec {

// Reads IMMUNOREC_LOG (error, warn, info, debug; default warn) and points the
// default logger at stderr.
void configure_logging();

// Throws Error(kInvalidConfig) on an unknown level name.
void set_log_level(std::string_view level);

}  // namespace immunorec
