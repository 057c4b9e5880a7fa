#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace mono3d {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from MONO3D_LOG (error|warn|info|debug); default warn.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("MONO3D_LOG");
    if (env == nullptr) return LogLevel::Warn;
    const std::string_view v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "warn") return LogLevel::Warn;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

inline void log_line(LogLevel lvl, std::string_view tag, const std::string& msg) {
  if (lvl <= log_level()) std::cerr << "[" << tag << "] " << msg << "\n";
}

inline void log_error(const std::string& msg) { log_line(LogLevel::Error, "error", msg); }
inline void log_warn(const std::string& msg) { log_line(LogLevel::Warn, "warn", msg); }
inline void log_info(const std::string& msg) { log_line(LogLevel::Info, "info", msg); }
inline void log_debug(const std::string& msg) { log_line(LogLevel::Debug, "debug", msg); }

}  // namespace mono3d
