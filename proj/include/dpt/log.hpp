#pragma once

#include <string_view>

namespace dpt {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold from DPT_LOG (error|warn|info|debug or 0-3); defaults to warn.
LogLevel log_threshold();
void log_message(LogLevel level, std::string_view msg);

}  // namespace dpt
