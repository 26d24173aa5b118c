#pragma once

#include "firecrest/http/types.hpp"
#include "firecrest/identity/identity_service.hpp"

namespace firecrest::services {

// Token endpoint: direct credential grant for registered clients plus the
// refresh grant. Form-encoded, unauthenticated.
class AuthService {
public:
    explicit AuthService(identity::IdentityService& identity) : identity_(identity) {}

    http::ApiResponse token(http::ApiRequest& req) const;

private:
    identity::IdentityService& identity_;
};

}  // namespace firecrest::services
