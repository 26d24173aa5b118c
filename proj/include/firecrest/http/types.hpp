#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "firecrest/identity/claims.hpp"
#include "firecrest/util/errors.hpp"

namespace firecrest::http {

struct FilePart {
    std::string filename;
    std::string content;
};

// Transport-independent request shape. The httplib adapter and the in-memory
// dispatch used by tests both produce this.
struct ApiRequest {
    std::string method;  // upper-case verb
    std::string path;    // decoded path, no query string
    std::map<std::string, std::string> headers;  // lower-case names
    std::map<std::string, std::string> query;    // decoded query parameters
    std::string body;
    std::string content_type;
    std::map<std::string, FilePart> files;      // multipart file parts
    std::map<std::string, std::string> form;    // urlencoded or multipart fields

    // Filled by the gateway during dispatch.
    std::map<std::string, std::string> path_params;
    std::optional<identity::Claims> claims;

    std::string header(const std::string& name) const {
        auto it = headers.find(name);
        return it == headers.end() ? std::string() : it->second;
    }
    std::string query_param(const std::string& name) const {
        auto it = query.find(name);
        return it == query.end() ? std::string() : it->second;
    }
    const identity::Claims& require_claims() const {
        if (!claims) throw ApiError(500, "no_claims", "handler reached without claims");
        return *claims;
    }
};

struct ApiResponse {
    int status = 200;
    std::map<std::string, std::string> headers;
    std::string body;
    std::string content_type = "application/json";
};

inline ApiResponse json_response(int status, const nlohmann::json& body) {
    ApiResponse resp;
    resp.status = status;
    resp.body = body.dump();
    return resp;
}

// Every non-2xx body is exactly one of these envelopes.
inline ApiResponse error_response(int status, const std::string& error_id,
                                  const std::string& message) {
    return json_response(status, {{"status", status}, {"error_id", error_id},
                                  {"message", message}});
}

inline ApiResponse error_response(const ApiError& e) {
    return error_response(e.status(), e.error_id(), e.what());
}

}  // namespace firecrest::http
