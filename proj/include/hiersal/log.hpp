#ifndef HIERSAL_LOG_HPP
#define HIERSAL_LOG_HPP

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace hiersal::log {

enum Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// HIERSAL_LOG: error, warn (default), info, debug
inline Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("HIERSAL_LOG");
        if (!env) return kWarn;
        if (std::strcmp(env, "error") == 0) return kError;
        if (std::strcmp(env, "info") == 0) return kInfo;
        if (std::strcmp(env, "debug") == 0) return kDebug;
        return kWarn;
    }();
    return lvl;
}

inline void write(Level lvl, const char* tag, const char* fmt, ...) {
    if (lvl > threshold()) return;
    std::fprintf(stderr, "[%s] ", tag);
    va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    va_end(args);
    std::fputc('\n', stderr);
}

#define HIERSAL_LOG_ERROR(...) ::hiersal::log::write(::hiersal::log::kError, "error", __VA_ARGS__)
#define HIERSAL_LOG_WARN(...) ::hiersal::log::write(::hiersal::log::kWarn, "warn", __VA_ARGS__)
#define HIERSAL_LOG_INFO(...) ::hiersal::log::write(::hiersal::log::kInfo, "info", __VA_ARGS__)
#define HIERSAL_LOG_DEBUG(...) ::hiersal::log::write(::hiersal::log::kDebug, "debug", __VA_ARGS__)

} // namespace hiersal::log

#endif
