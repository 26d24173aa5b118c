#include "firecrest/gateway/gateway.hpp"

namespace firecrest::gateway {

Gateway::Gateway(identity::IdentityService& identity, ClockFn clock)
    : identity_(identity), clock_(std::move(clock)) {}

void Gateway::add_route(http::Route route) { router_.add(std::move(route)); }

http::ApiResponse Gateway::handle(http::ApiRequest request) const {
    auto match = router_.resolve(request.method, request.path);
    if (match.outcome == http::Router::Outcome::not_found) {
        return http::error_response(404, "route_not_found", "no such route");
    }
    if (match.outcome == http::Router::Outcome::method_not_allowed) {
        return http::error_response(405, "method_not_allowed",
                                    "method not allowed on this route");
    }
    const http::Route& route = *match.route;
    request.path_params = std::move(match.params);

    if (route.auth_required) {
        std::string header = request.header("authorization");
        if (header.empty()) {
            return http::error_response(401, "token_missing",
                                        "Authorization: Bearer header is required");
        }
        const std::string prefix = "Bearer ";
        if (header.rfind(prefix, 0) != 0) {
            return http::error_response(401, "token_missing",
                                        "Authorization header must use the Bearer scheme");
        }
        try {
            auto claims = identity_.validate_token(header.substr(prefix.size()), clock_());
            if (claims.token_type != identity::TokenType::access) {
                return http::error_response(401, "token_invalid",
                                            "refresh tokens cannot authorize API calls");
            }
            request.claims = std::move(claims);
        } catch (const ApiError& e) {
            return http::error_response(e);
        }
    }

    route.invocations->fetch_add(1);
    try {
        return route.handler(request);
    } catch (const ApiError& e) {
        return http::error_response(e);
    } catch (const std::exception& e) {
        return http::error_response(500, "internal_error", e.what());
    }
}

std::map<std::string, std::uint64_t> Gateway::invocation_counts() const {
    std::map<std::string, std::uint64_t> out;
    for (const auto& r : router_.routes()) {
        out[r.method + " " + r.pattern] = r.invocations->load();
    }
    return out;
}

}  // namespace firecrest::gateway
