#include "dpt/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace dpt {

namespace {

LogLevel parse_level(const char* env) {
  if (!env) return LogLevel::Warn;
  const std::string s = env;
  if (s == "error" || s == "0") return LogLevel::Error;
  if (s == "info" || s == "2") return LogLevel::Info;
  if (s == "debug" || s == "3") return LogLevel::Debug;
  return LogLevel::Warn;
}

constexpr const char* kNames[] = {"error", "warn", "info", "debug"};

}  // namespace

LogLevel log_threshold() {
  static const LogLevel level = parse_level(std::getenv("DPT_LOG"));
  return level;
}

void log_message(LogLevel level, std::string_view msg) {
  if (level > log_threshold()) return;
  static std::mutex m;
  std::lock_guard lock(m);
  std::cerr << "[dpt " << kNames[static_cast<int>(level)] << "] " << msg << '\n';
}

}  // namespace dpt
