#pragma once

#include <cstdint>
#include <string>

namespace firecrest::identity {

enum class TokenType { access, refresh };

inline const char* to_string(TokenType t) {
    return t == TokenType::access ? "access" : "refresh";
}

struct Claims {
    std::string username;
    std::string client_id;
    std::int64_t issued_at = 0;
    std::int64_t expires_at = 0;
    TokenType token_type = TokenType::access;
};

}  // namespace firecrest::identity
