#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "firecrest/util/crypto.hpp"

namespace firecrest::jwt {

enum class Error { none, malformed, bad_signature };

// Signer/verifier for the compact serialization header.payload.signature.
// Supported algorithms: HS256 (shared secret) and RS256 (RSA key pair).
class Signer {
public:
    static Signer hs256(std::string secret);
    static Signer rs256(std::shared_ptr<crypto::SigningKey> key);

    std::string encode(const nlohmann::json& payload) const;

    // Verifies the signature and the alg header, then parses the payload.
    // Expiry is deliberately not checked here; callers own time semantics.
    Error decode(const std::string& token, nlohmann::json& payload_out) const;

    const std::string& algorithm() const { return alg_; }

private:
    Signer() = default;
    std::string sign_input(const std::string& input) const;
    bool verify_input(const std::string& input, const std::string& sig) const;

    std::string alg_;
    std::string secret_;
    std::shared_ptr<crypto::SigningKey> key_;
};

// Exposed for direct vector tests against RFC 7515.
std::string hs256_sign(const std::string& signing_input, const std::string& secret);

}  // namespace firecrest::jwt
