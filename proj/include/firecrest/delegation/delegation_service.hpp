#pragma once

#include <functional>
#include <memory>
#include <string>

#include "firecrest/config.hpp"
#include "firecrest/delegation/certificate.hpp"
#include "firecrest/identity/claims.hpp"
#include "firecrest/util/clock.hpp"
#include "firecrest/util/crypto.hpp"

namespace firecrest::delegation {

struct ExecutionResult {
    int exit_code = 0;
    std::string output;  // captured stdout
    std::string error;   // captured stderr
    int http_status = 0;     // backing failure mapped to an HTTP code, 0 when ok
    std::string error_id;

    bool ok() const { return exit_code == 0; }
};

// Machine-side command execution as a given principal. Implemented by the
// per-machine sandbox executor; an SSH transport could implement it later.
class CommandExecutor {
public:
    virtual ~CommandExecutor() = default;
    virtual ExecutionResult execute(const std::string& principal, const std::string& command,
                                    const std::string& input) = 0;
};

enum class VerifyFailure { none, bad_signature, not_yet_valid, expired, command_mismatch,
                           invalid_certificate };

const char* to_string(VerifyFailure f);

// Internal-only service: converts validated claims into command-scoped
// certificates and gates every delegated execution on certificate checks.
class DelegationService {
public:
    DelegationService(DelegationConfig config, ClockFn clock);

    DelegationCertificate mint_certificate(const identity::Claims& claims,
                                           const std::string& command,
                                           std::int64_t ttl_seconds) const;

    // Runs `command` through `executor` iff the certificate signature, the
    // validity window at now, and command equality all pass.
    ExecutionResult verify_and_execute(const DelegationCertificate& cert,
                                       const std::string& command, CommandExecutor& executor,
                                       const std::string& input = {}) const;

    VerifyFailure check(const DelegationCertificate& cert, const std::string& command,
                        std::int64_t now) const;

    std::string ca_public_key_pem() const { return ca_key_->public_key_pem(); }
    std::int64_t max_ttl() const { return config_.max_ttl_seconds; }

    // Test observer: called after every verification attempt.
    using VerifyObserver = std::function<void(const DelegationCertificate&, const std::string&,
                                              VerifyFailure)>;
    void set_verify_observer(VerifyObserver obs) { observer_ = std::move(obs); }

private:
    DelegationConfig config_;
    ClockFn clock_;
    std::unique_ptr<crypto::SigningKey> ca_key_;
    VerifyObserver observer_;
};

// Convenience for call sites that mint and immediately execute one command.
ExecutionResult run_delegated(const DelegationService& svc, const identity::Claims& claims,
                              const std::string& command, CommandExecutor& executor,
                              const std::string& input = {});

}  // namespace firecrest::delegation
