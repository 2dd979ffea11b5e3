#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace agdlab {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Level comes from AGDLAB_LOG (error/info/debug); default is error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("AGDLAB_LOG");
    if (env == nullptr) return LogLevel::kError;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    return LogLevel::kError;
  }();
  return level;
}

inline void log_at(LogLevel lvl, const char* tag, const char* fmt, va_list args) {
  if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
  std::fprintf(stderr, "[agdlab %s] ", tag);
  std::vfprintf(stderr, fmt, args);
  std::fputc('\n', stderr);
}

inline void log_error(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  log_at(LogLevel::kError, "error", fmt, args);
  va_end(args);
}

inline void log_info(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  log_at(LogLevel::kInfo, "info", fmt, args);
  va_end(args);
}

inline void log_debug(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  log_at(LogLevel::kDebug, "debug", fmt, args);
  va_end(args);
}

}  // namespace agdlab
