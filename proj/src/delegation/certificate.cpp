#include "firecrest/delegation/certificate.hpp"

#include <nlohmann/json.hpp>

namespace firecrest::delegation {

std::string DelegationCertificate::canonical_bytes() const {
    nlohmann::ordered_json j;
    j["principal"] = principal;
    j["public_key_fingerprint"] = public_key_fingerprint;
    j["valid_after"] = valid_after;
    j["valid_before"] = valid_before;
    j["permitted_command"] = permitted_command;
    return j.dump();
}

std::string DelegationCertificate::serialize() const {
    nlohmann::ordered_json j;
    j["principal"] = principal;
    j["public_key_fingerprint"] = public_key_fingerprint;
    j["valid_after"] = valid_after;
    j["valid_before"] = valid_before;
    j["permitted_command"] = permitted_command;
    j["signature"] = signature;
    return j.dump();
}

std::optional<DelegationCertificate> DelegationCertificate::parse(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    DelegationCertificate cert;
    try {
        cert.principal = j.at("principal").get<std::string>();
        cert.public_key_fingerprint = j.at("public_key_fingerprint").get<std::string>();
        cert.valid_after = j.at("valid_after").get<std::int64_t>();
        cert.valid_before = j.at("valid_before").get<std::int64_t>();
        cert.permitted_command = j.at("permitted_command").get<std::string>();
        cert.signature = j.at("signature").get<std::string>();
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return cert;
}

}  // namespace firecrest::delegation
