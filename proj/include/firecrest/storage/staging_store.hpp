#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "firecrest/util/clock.hpp"

namespace firecrest::storage {

struct TempUrl {
    std::string path;    // "/staging/<object_key>"
    std::string method;  // "PUT" | "GET"
    std::int64_t expires = 0;
    std::string signature;  // lowercase hex HMAC-SHA256

    // Relative URL with the signature query parameters attached.
    std::string to_url() const;
};

// In-process staging object store following the object-store temp-URL
// convention: the only unauthenticated surface, gated by an HMAC over
// method, expiry and object path.
class StagingStore {
public:
    StagingStore(std::string secret, ClockFn clock);

    TempUrl make_temp_url(const std::string& method, const std::string& object_key,
                          std::int64_t ttl_seconds) const;

    // Constant-time signature check plus expiry; the gate for put/fetch.
    bool verify(const std::string& method, const std::string& path, std::int64_t expires,
                const std::string& signature, std::int64_t now) const;

    void put(const std::string& object_key, std::string bytes);
    std::optional<std::string> fetch(const std::string& object_key) const;
    bool exists(const std::string& object_key) const;
    void remove(const std::string& object_key);
    std::size_t object_count() const;

    // Objects whose recorded URL expiry has passed are garbage.
    void set_expiry(const std::string& object_key, std::int64_t expires_at);
    std::size_t collect_garbage();

    bool ping() const;
    void set_available(bool v) { available_ = v; }

    static std::string signing_string(const std::string& method, std::int64_t expires,
                                      const std::string& path);

private:
    struct Object {
        std::string bytes;
        std::int64_t created_at = 0;
        std::optional<std::int64_t> expires_at;
    };

    std::string secret_;
    ClockFn clock_;
    mutable std::mutex mutex_;
    std::map<std::string, Object> objects_;
    std::atomic<bool> available_{true};
};

}  // namespace firecrest::storage
