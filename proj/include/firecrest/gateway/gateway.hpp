#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "firecrest/http/router.hpp"
#include "firecrest/identity/identity_service.hpp"
#include "firecrest/util/clock.hpp"

namespace firecrest::gateway {

// Single entry point: validates the bearer token on every authenticated
// route before any handler runs, then dispatches in-process. Holds only
// immutable route state after startup.
class Gateway {
public:
    Gateway(identity::IdentityService& identity, ClockFn clock);

    void add_route(http::Route route);
    http::ApiResponse handle(http::ApiRequest request) const;

    const std::vector<http::Route>& routes() const { return router_.routes(); }

    // Test instrumentation: handler invocation counts keyed "METHOD pattern".
    std::map<std::string, std::uint64_t> invocation_counts() const;

private:
    identity::IdentityService& identity_;
    ClockFn clock_;
    http::Router router_;
};

}  // namespace firecrest::gateway
