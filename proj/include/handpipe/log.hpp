#ifndef HANDPIPE_LOG_HPP_
#define HANDPIPE_LOG_HPP_

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace handpipe::log {

enum class Level : int { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Level comes from HANDPIPE_LOG (error|warn|info|debug), default warn.
inline Level threshold() {
  static Level lvl = [] {
    const char* env = std::getenv("HANDPIPE_LOG");
    if (env == nullptr) return Level::kWarn;
    if (std::strcmp(env, "error") == 0) return Level::kError;
    if (std::strcmp(env, "info") == 0) return Level::kInfo;
    if (std::strcmp(env, "debug") == 0) return Level::kDebug;
    return Level::kWarn;
  }();
  return lvl;
}

inline void write(Level lvl, const std::string& msg) {
  if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

inline void error(const std::string& msg) { write(Level::kError, msg); }
inline void warn(const std::string& msg) { write(Level::kWarn, msg); }
inline void info(const std::string& msg) { write(Level::kInfo, msg); }
inline void debug(const std::string& msg) { write(Level::kDebug, msg); }

}  // namespace handpipe::log

#endif  // HANDPIPE_LOG_HPP_
