#pragma once

#include <string>

namespace hpc {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

// Threshold comes from the HPC_LOG environment variable
// (debug|info|warn|error|off), default info. Read once.
LogLevel log_level();

void log_msg(LogLevel level, const std::string& msg);

void log_debug(const std::string& msg);
void log_info(const std::string& msg);
void log_warn(const std::string& msg);
void log_error(const std::string& msg);

}  // namespace hpc
