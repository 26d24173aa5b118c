#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace firecrest::encoding {

std::string base64_encode(std::string_view data, bool url_safe = false, bool pad = true);
std::optional<std::string> base64_decode(std::string_view text);

// Base64url without padding, the JWT convention.
inline std::string base64url_encode(std::string_view data) {
    return base64_encode(data, /*url_safe=*/true, /*pad=*/false);
}
std::optional<std::string> base64url_decode(std::string_view text);

std::string hex_encode(std::string_view data);
std::optional<std::string> hex_decode(std::string_view text);

std::string url_decode(std::string_view text);
std::string url_encode(std::string_view text);

}  // namespace firecrest::encoding
