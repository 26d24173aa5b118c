#include "firecrest/identity/identity_service.hpp"

#include <stdexcept>

#include "firecrest/util/crypto.hpp"
#include "firecrest/util/errors.hpp"

namespace firecrest::identity {

namespace {

jwt::Signer make_signer(const IdentityConfig& cfg) {
    if (cfg.algorithm == "HS256") {
        if (cfg.hs256_secret.empty())
            throw std::runtime_error("identity: HS256 requires a secret");
        return jwt::Signer::hs256(cfg.hs256_secret);
    }
    if (cfg.algorithm == "RS256") {
        std::shared_ptr<crypto::SigningKey> key;
        if (cfg.rsa_private_key_pem.empty()) {
            key = crypto::generate_rsa();
        } else {
            key = crypto::load_rsa_private_pem(resolve_pem(cfg.rsa_private_key_pem));
        }
        return jwt::Signer::rs256(std::move(key));
    }
    throw std::runtime_error("identity: unsupported algorithm " + cfg.algorithm);
}

}  // namespace

IdentityService::IdentityService(IdentityConfig config, ClockFn clock)
    : config_(std::move(config)), clock_(std::move(clock)), signer_(make_signer(config_)) {
    if (config_.access_ttl_seconds <= 0 ||
        config_.refresh_ttl_seconds < config_.access_ttl_seconds) {
        throw std::runtime_error("identity: refresh TTL must be >= access TTL > 0");
    }
    for (const auto& c : config_.clients) clients_[c.client_id] = c.client_secret;
    for (const auto& u : config_.users) users_[u.username] = u.password_hash;
}

TokenPair IdentityService::mint_pair(const std::string& username,
                                     const std::string& client_id) const {
    std::int64_t now = clock_();
    auto make = [&](TokenType type, std::int64_t ttl) {
        nlohmann::json payload = {{"sub", username},
                                  {"client_id", client_id},
                                  {"iat", now},
                                  {"exp", now + ttl},
                                  {"token_type", to_string(type)}};
        return signer_.encode(payload);
    };
    TokenPair pair;
    pair.access_token = make(TokenType::access, config_.access_ttl_seconds);
    pair.refresh_token = make(TokenType::refresh, config_.refresh_ttl_seconds);
    pair.expires_in = config_.access_ttl_seconds;
    pair.refresh_expires_in = config_.refresh_ttl_seconds;
    return pair;
}

TokenPair IdentityService::issue_token(const std::string& client_id,
                                       const std::string& client_secret,
                                       const std::string& username,
                                       const std::string& password) const {
    auto client = clients_.find(client_id);
    if (client == clients_.end() ||
        !crypto::constant_time_equal(client->second, client_secret)) {
        throw ApiError(401, "invalid_client", "unknown client or bad client secret");
    }
    auto user = users_.find(username);
    if (user == users_.end() || !crypto::verify_password(password, user->second)) {
        throw ApiError(401, "invalid_grant", "bad user credentials");
    }
    return mint_pair(username, client_id);
}

Claims IdentityService::validate_token(const std::string& token, std::int64_t now) const {
    nlohmann::json payload;
    switch (signer_.decode(token, payload)) {
        case jwt::Error::malformed:
            throw ApiError(401, "token_malformed", "token is not a valid JWT");
        case jwt::Error::bad_signature:
            throw ApiError(401, "token_invalid", "token signature verification failed");
        case jwt::Error::none:
            break;
    }
    Claims claims;
    try {
        claims.username = payload.at("sub").get<std::string>();
        claims.client_id = payload.at("client_id").get<std::string>();
        claims.issued_at = payload.at("iat").get<std::int64_t>();
        claims.expires_at = payload.at("exp").get<std::int64_t>();
        std::string type = payload.at("token_type").get<std::string>();
        if (type == "access") claims.token_type = TokenType::access;
        else if (type == "refresh") claims.token_type = TokenType::refresh;
        else throw std::runtime_error("bad token_type");
    } catch (const std::exception&) {
        throw ApiError(401, "token_malformed", "token payload is missing required claims");
    }
    if (now >= claims.expires_at) {
        throw ApiError(401, "token_expired", "token has expired");
    }
    return claims;
}

TokenPair IdentityService::refresh(const std::string& refresh_token) const {
    Claims claims = validate_token(refresh_token, clock_());
    if (claims.token_type != TokenType::refresh) {
        throw ApiError(401, "invalid_grant", "token is not a refresh token");
    }
    return mint_pair(claims.username, claims.client_id);
}

}  // namespace firecrest::identity
