#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

namespace firecrest {

// All token, certificate and temp-URL validity math runs on unix seconds
// obtained through an injectable clock so tests can move time.
using ClockFn = std::function<std::int64_t()>;

inline std::int64_t system_unix_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

inline ClockFn system_clock_fn() {
    return [] { return system_unix_now(); };
}

std::string iso8601_utc(std::int64_t unix_seconds);

}  // namespace firecrest
