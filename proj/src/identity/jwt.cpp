#include "firecrest/identity/jwt.hpp"

#include "firecrest/util/encoding.hpp"

namespace firecrest::jwt {

using encoding::base64url_decode;
using encoding::base64url_encode;

std::string hs256_sign(const std::string& signing_input, const std::string& secret) {
    return crypto::hmac_sha256(secret, signing_input);
}

Signer Signer::hs256(std::string secret) {
    Signer s;
    s.alg_ = "HS256";
    s.secret_ = std::move(secret);
    return s;
}

Signer Signer::rs256(std::shared_ptr<crypto::SigningKey> key) {
    Signer s;
    s.alg_ = "RS256";
    s.key_ = std::move(key);
    return s;
}

std::string Signer::sign_input(const std::string& input) const {
    if (alg_ == "HS256") return hs256_sign(input, secret_);
    return key_->sign(input);
}

bool Signer::verify_input(const std::string& input, const std::string& sig) const {
    if (alg_ == "HS256") return crypto::constant_time_equal(hs256_sign(input, secret_), sig);
    return key_->verify(input, sig);
}

std::string Signer::encode(const nlohmann::json& payload) const {
    nlohmann::json header = {{"alg", alg_}, {"typ", "JWT"}};
    std::string input =
        base64url_encode(header.dump()) + "." + base64url_encode(payload.dump());
    return input + "." + base64url_encode(sign_input(input));
}

Error Signer::decode(const std::string& token, nlohmann::json& payload_out) const {
    auto dot1 = token.find('.');
    if (dot1 == std::string::npos) return Error::malformed;
    auto dot2 = token.find('.', dot1 + 1);
    if (dot2 == std::string::npos || token.find('.', dot2 + 1) != std::string::npos)
        return Error::malformed;

    auto header_raw = base64url_decode(token.substr(0, dot1));
    auto payload_raw = base64url_decode(token.substr(dot1 + 1, dot2 - dot1 - 1));
    auto sig_raw = base64url_decode(token.substr(dot2 + 1));
    if (!header_raw || !payload_raw || !sig_raw) return Error::malformed;

    nlohmann::json header = nlohmann::json::parse(*header_raw, nullptr, false);
    if (header.is_discarded() || !header.is_object()) return Error::malformed;
    // Reject algorithm confusion: the token must use this signer's alg.
    if (!header.contains("alg") || header["alg"] != alg_) return Error::bad_signature;

    if (!verify_input(token.substr(0, dot2), *sig_raw)) return Error::bad_signature;

    nlohmann::json payload = nlohmann::json::parse(*payload_raw, nullptr, false);
    if (payload.is_discarded() || !payload.is_object()) return Error::malformed;
    payload_out = std::move(payload);
    return Error::none;
}

}  // namespace firecrest::jwt
