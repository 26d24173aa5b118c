#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace firecrest::crypto {

std::string sha256(std::string_view data);                           // raw 32 bytes
std::string sha256_hex(std::string_view data);
std::string hmac_sha256(std::string_view key, std::string_view msg); // raw 32 bytes
std::string hmac_sha256_hex(std::string_view key, std::string_view msg);

bool constant_time_equal(std::string_view a, std::string_view b);

std::string random_bytes(std::size_t n);
// 128-bit random identifier, base64url encoded (22 chars).
std::string random_token_id();

std::string pbkdf2_sha256(std::string_view password, std::string_view salt, int iterations,
                          std::size_t key_len);
// Produces "pbkdf2-sha256$<iters>$<salt_b64>$<hash_b64>".
std::string hash_password(std::string_view password);
bool verify_password(std::string_view password, std::string_view stored_hash);

// Asymmetric keys behind one small interface so the signature algorithm is a
// config choice (Ed25519 for delegation certificates, RSA for RS256 tokens).
class SigningKey {
public:
    virtual ~SigningKey() = default;
    virtual std::string sign(std::string_view msg) const = 0;
    virtual bool verify(std::string_view msg, std::string_view sig) const = 0;
    virtual std::string public_key_pem() const = 0;
    virtual std::string private_key_pem() const = 0;
};

std::unique_ptr<SigningKey> generate_ed25519();
std::unique_ptr<SigningKey> load_ed25519_private_pem(const std::string& pem);
// Verification-only handle built from a public key PEM.
std::unique_ptr<SigningKey> load_ed25519_public_pem(const std::string& pem);

std::unique_ptr<SigningKey> generate_rsa(int bits = 2048);
std::unique_ptr<SigningKey> load_rsa_private_pem(const std::string& pem);

}  // namespace firecrest::crypto
