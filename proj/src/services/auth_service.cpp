#include "firecrest/services/auth_service.hpp"

#include "firecrest/util/encoding.hpp"

namespace firecrest::services {

namespace {

// Parses application/x-www-form-urlencoded bodies; multipart fields arrive
// pre-parsed in req.form.
std::map<std::string, std::string> form_fields(const http::ApiRequest& req) {
    std::map<std::string, std::string> out = req.form;
    std::size_t start = 0;
    const std::string& body = req.body;
    while (start < body.size()) {
        auto amp = body.find('&', start);
        if (amp == std::string::npos) amp = body.size();
        auto eq = body.find('=', start);
        if (eq != std::string::npos && eq < amp) {
            out[encoding::url_decode(body.substr(start, eq - start))] =
                encoding::url_decode(body.substr(eq + 1, amp - eq - 1));
        }
        start = amp + 1;
    }
    return out;
}

nlohmann::json pair_to_json(const identity::TokenPair& pair) {
    return {{"access_token", pair.access_token},
            {"refresh_token", pair.refresh_token},
            {"token_type", "Bearer"},
            {"expires_in", pair.expires_in},
            {"refresh_expires_in", pair.refresh_expires_in}};
}

}  // namespace

http::ApiResponse AuthService::token(http::ApiRequest& req) const {
    auto fields = form_fields(req);
    std::string grant = fields.count("grant_type") ? fields["grant_type"] : "";
    if (grant == "password") {
        auto pair = identity_.issue_token(fields["client_id"], fields["client_secret"],
                                          fields["username"], fields["password"]);
        return http::json_response(200, pair_to_json(pair));
    }
    if (grant == "refresh_token") {
        auto pair = identity_.refresh(fields["refresh_token"]);
        return http::json_response(200, pair_to_json(pair));
    }
    throw ApiError(400, "unsupported_grant_type",
                   "grant_type must be password or refresh_token");
}

}  // namespace firecrest::services
