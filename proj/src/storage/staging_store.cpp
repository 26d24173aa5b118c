#include "firecrest/storage/staging_store.hpp"

#include "firecrest/util/crypto.hpp"
#include "firecrest/util/encoding.hpp"

namespace firecrest::storage {

std::string TempUrl::to_url() const {
    return encoding::url_encode(path) + "?temp_url_sig=" + signature +
           "&temp_url_expires=" + std::to_string(expires);
}

StagingStore::StagingStore(std::string secret, ClockFn clock)
    : secret_(std::move(secret)), clock_(std::move(clock)) {}

std::string StagingStore::signing_string(const std::string& method, std::int64_t expires,
                                         const std::string& path) {
    return method + "\n" + std::to_string(expires) + "\n" + path;
}

TempUrl StagingStore::make_temp_url(const std::string& method, const std::string& object_key,
                                    std::int64_t ttl_seconds) const {
    TempUrl url;
    url.method = method;
    url.path = "/staging/" + object_key;
    url.expires = clock_() + ttl_seconds;
    url.signature =
        crypto::hmac_sha256_hex(secret_, signing_string(method, url.expires, url.path));
    return url;
}

bool StagingStore::verify(const std::string& method, const std::string& path,
                          std::int64_t expires, const std::string& signature,
                          std::int64_t now) const {
    if (now >= expires) return false;
    std::string expected = crypto::hmac_sha256_hex(secret_, signing_string(method, expires, path));
    return crypto::constant_time_equal(expected, signature);
}

void StagingStore::put(const std::string& object_key, std::string bytes) {
    std::lock_guard lock(mutex_);
    Object obj;
    obj.bytes = std::move(bytes);
    obj.created_at = clock_();
    objects_[object_key] = std::move(obj);
}

std::optional<std::string> StagingStore::fetch(const std::string& object_key) const {
    std::lock_guard lock(mutex_);
    auto it = objects_.find(object_key);
    if (it == objects_.end()) return std::nullopt;
    return it->second.bytes;
}

bool StagingStore::exists(const std::string& object_key) const {
    std::lock_guard lock(mutex_);
    return objects_.count(object_key) > 0;
}

void StagingStore::remove(const std::string& object_key) {
    std::lock_guard lock(mutex_);
    objects_.erase(object_key);
}

std::size_t StagingStore::object_count() const {
    std::lock_guard lock(mutex_);
    return objects_.size();
}

void StagingStore::set_expiry(const std::string& object_key, std::int64_t expires_at) {
    std::lock_guard lock(mutex_);
    auto it = objects_.find(object_key);
    if (it != objects_.end()) it->second.expires_at = expires_at;
}

std::size_t StagingStore::collect_garbage() {
    std::lock_guard lock(mutex_);
    std::int64_t now = clock_();
    std::size_t removed = 0;
    for (auto it = objects_.begin(); it != objects_.end();) {
        if (it->second.expires_at && now >= *it->second.expires_at) {
            it = objects_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

bool StagingStore::ping() const { return available_.load(); }

}  // namespace firecrest::storage
