#pragma once

#include <map>
#include <string>

#include "firecrest/config.hpp"
#include "firecrest/identity/claims.hpp"
#include "firecrest/identity/jwt.hpp"
#include "firecrest/util/clock.hpp"

namespace firecrest::identity {

struct TokenPair {
    std::string access_token;
    std::string refresh_token;
    std::int64_t expires_in = 0;          // access token lifetime
    std::int64_t refresh_expires_in = 0;
};

// Issues, refreshes and validates signed bearer tokens for registered
// clients. Validation is stateless: signature plus expiry against the
// provided time, no session storage.
class IdentityService {
public:
    IdentityService(IdentityConfig config, ClockFn clock);

    TokenPair issue_token(const std::string& client_id, const std::string& client_secret,
                          const std::string& username, const std::string& password) const;

    Claims validate_token(const std::string& token, std::int64_t now) const;
    Claims validate_token(const std::string& token) const { return validate_token(token, clock_()); }

    TokenPair refresh(const std::string& refresh_token) const;

    std::int64_t access_ttl() const { return config_.access_ttl_seconds; }
    bool user_exists(const std::string& username) const { return users_.count(username) > 0; }

private:
    TokenPair mint_pair(const std::string& username, const std::string& client_id) const;

    IdentityConfig config_;
    ClockFn clock_;
    jwt::Signer signer_;
    std::map<std::string, std::string> clients_;  // client_id -> secret
    std::map<std::string, std::string> users_;    // username -> password hash
};

}  // namespace firecrest::identity
