#pragma once

#include <stdexcept>
#include <string>

namespace firecrest {

// Service-level failure that maps 1:1 onto an HTTP error envelope.
// Handlers throw it; the gateway turns it into the JSON error body.
class ApiError : public std::runtime_error {
public:
    ApiError(int status, std::string error_id, const std::string& message)
        : std::runtime_error(message), status_(status), error_id_(std::move(error_id)) {}

    int status() const noexcept { return status_; }
    const std::string& error_id() const noexcept { return error_id_; }

private:
    int status_;
    std::string error_id_;
};

}  // namespace firecrest
