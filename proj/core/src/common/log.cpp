#include "hpc/common/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace hpc {

static LogLevel parse_level(const char* s) {
  if (!s) return LogLevel::kInfo;
  if (!std::strcmp(s, "debug")) return LogLevel::kDebug;
  if (!std::strcmp(s, "info")) return LogLevel::kInfo;
  if (!std::strcmp(s, "warn")) return LogLevel::kWarn;
  if (!std::strcmp(s, "error")) return LogLevel::kError;
  if (!std::strcmp(s, "off")) return LogLevel::kOff;
  return LogLevel::kInfo;
}

LogLevel log_level() {
  static LogLevel level = parse_level(std::getenv("HPC_LOG"));
  return level;
}

void log_msg(LogLevel level, const std::string& msg) {
  if (level < log_level()) return;
  static const char* names[] = {"debug", "info", "warn", "error"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

void log_debug(const std::string& msg) { log_msg(LogLevel::kDebug, msg); }
void log_info(const std::string& msg) { log_msg(LogLevel::kInfo, msg); }
void log_warn(const std::string& msg) { log_msg(LogLevel::kWarn, msg); }
void log_error(const std::string& msg) { log_msg(LogLevel::kError, msg); }

}  // namespace hpc
