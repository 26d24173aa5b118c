#include "firecrest/delegation/delegation_service.hpp"

#include "firecrest/util/encoding.hpp"
#include "firecrest/util/errors.hpp"

namespace firecrest::delegation {

const char* to_string(VerifyFailure f) {
    switch (f) {
        case VerifyFailure::none: return "none";
        case VerifyFailure::bad_signature: return "bad_signature";
        case VerifyFailure::not_yet_valid: return "not_yet_valid";
        case VerifyFailure::expired: return "expired";
        case VerifyFailure::command_mismatch: return "command_mismatch";
        case VerifyFailure::invalid_certificate: return "invalid_certificate";
    }
    return "unknown";
}

DelegationService::DelegationService(DelegationConfig config, ClockFn clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
    if (config_.ca_key_pem.empty()) {
        ca_key_ = crypto::generate_ed25519();
    } else {
        ca_key_ = crypto::load_ed25519_private_pem(resolve_pem(config_.ca_key_pem));
    }
}

DelegationCertificate DelegationService::mint_certificate(const identity::Claims& claims,
                                                          const std::string& command,
                                                          std::int64_t ttl_seconds) const {
    if (command.empty()) {
        throw ApiError(400, "empty_command", "certificate requires a permitted command");
    }
    if (ttl_seconds <= 0 || ttl_seconds > config_.max_ttl_seconds) {
        throw ApiError(400, "ttl_out_of_range",
                       "certificate TTL must be within the configured maximum");
    }
    DelegationCertificate cert;
    cert.principal = claims.username;
    // Ephemeral per-certificate keypair; the fingerprint ties the credential
    // to it the way an SSH user certificate embeds the user public key.
    auto ephemeral = crypto::generate_ed25519();
    cert.public_key_fingerprint =
        "SHA256:" + encoding::base64_encode(crypto::sha256(ephemeral->public_key_pem()),
                                            false, false);
    cert.valid_after = clock_();
    cert.valid_before = cert.valid_after + ttl_seconds;
    cert.permitted_command = command;
    cert.signature = encoding::base64_encode(ca_key_->sign(cert.canonical_bytes()));
    return cert;
}

VerifyFailure DelegationService::check(const DelegationCertificate& cert,
                                       const std::string& command, std::int64_t now) const {
    if (cert.permitted_command.empty() || cert.valid_before <= cert.valid_after ||
        cert.valid_before - cert.valid_after > config_.max_ttl_seconds) {
        return VerifyFailure::invalid_certificate;
    }
    auto sig = encoding::base64_decode(cert.signature);
    if (!sig || !ca_key_->verify(cert.canonical_bytes(), *sig)) {
        return VerifyFailure::bad_signature;
    }
    if (now < cert.valid_after) return VerifyFailure::not_yet_valid;
    if (now >= cert.valid_before) return VerifyFailure::expired;
    if (command != cert.permitted_command) return VerifyFailure::command_mismatch;
    return VerifyFailure::none;
}

ExecutionResult DelegationService::verify_and_execute(const DelegationCertificate& cert,
                                                      const std::string& command,
                                                      CommandExecutor& executor,
                                                      const std::string& input) const {
    VerifyFailure failure = check(cert, command, clock_());
    if (observer_) observer_(cert, command, failure);
    if (failure != VerifyFailure::none) {
        throw ApiError(403, std::string("delegation_") + to_string(failure),
                       std::string("certificate rejected: ") + to_string(failure));
    }
    return executor.execute(cert.principal, command, input);
}

ExecutionResult run_delegated(const DelegationService& svc, const identity::Claims& claims,
                              const std::string& command, CommandExecutor& executor,
                              const std::string& input) {
    auto cert = svc.mint_certificate(claims, command, svc.max_ttl() < 120 ? svc.max_ttl() : 120);
    return svc.verify_and_execute(cert, command, executor, input);
}

}  // namespace firecrest::delegation
