#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace firecrest::delegation {

// Short-lived signed credential: one principal, one validity window, exactly
// one permitted command. The signature is a detached Ed25519 signature by the
// CA key over the canonical serialization of the other fields.
struct DelegationCertificate {
    std::string principal;
    std::string public_key_fingerprint;
    std::int64_t valid_after = 0;
    std::int64_t valid_before = 0;
    std::string permitted_command;
    std::string signature;  // base64

    // Fixed field order, UTF-8, no insignificant whitespace. These are the
    // exact bytes the CA signs.
    std::string canonical_bytes() const;

    std::string serialize() const;  // canonical fields + signature
    static std::optional<DelegationCertificate> parse(const std::string& text);

    bool operator==(const DelegationCertificate&) const = default;
};

}  // namespace firecrest::delegation
