#include "firecrest/util/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/pem.h>
#include <openssl/rand.h>
#include <openssl/rsa.h>
#include <openssl/sha.h>

#include <cstring>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "firecrest/util/encoding.hpp"

namespace firecrest::crypto {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

struct BioDeleter {
    void operator()(BIO* b) const { BIO_free(b); }
};
using BioPtr = std::unique_ptr<BIO, BioDeleter>;

[[noreturn]] void fail(const char* what) {
    throw std::runtime_error(std::string("crypto: ") + what);
}

std::string pem_from(EVP_PKEY* key, bool is_private) {
    BioPtr bio(BIO_new(BIO_s_mem()));
    if (!bio) fail("BIO_new");
    int rc = is_private
                 ? PEM_write_bio_PrivateKey(bio.get(), key, nullptr, nullptr, 0, nullptr, nullptr)
                 : PEM_write_bio_PUBKEY(bio.get(), key);
    if (rc != 1) fail("PEM write");
    char* data = nullptr;
    long len = BIO_get_mem_data(bio.get(), &data);
    return std::string(data, static_cast<std::size_t>(len));
}

PkeyPtr pem_to_key(const std::string& pem, bool is_private) {
    BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
    if (!bio) fail("BIO_new_mem_buf");
    EVP_PKEY* key = is_private ? PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr)
                               : PEM_read_bio_PUBKEY(bio.get(), nullptr, nullptr, nullptr);
    if (!key) fail("PEM parse");
    return PkeyPtr(key);
}

// EdDSA signs the message directly; RSA signatures run it through SHA-256.
class EvpKey final : public SigningKey {
public:
    EvpKey(PkeyPtr key, bool has_private, bool digest_first)
        : key_(std::move(key)), has_private_(has_private), digest_first_(digest_first) {}

    std::string sign(std::string_view msg) const override {
        if (!has_private_) fail("sign with public-only key");
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        if (!ctx) fail("EVP_MD_CTX_new");
        std::string sig;
        std::size_t sig_len = 0;
        bool ok = EVP_DigestSignInit(ctx, nullptr, digest_first_ ? EVP_sha256() : nullptr,
                                     nullptr, key_.get()) == 1 &&
                  EVP_DigestSign(ctx, nullptr, &sig_len,
                                 reinterpret_cast<const unsigned char*>(msg.data()),
                                 msg.size()) == 1;
        if (ok) {
            sig.resize(sig_len);
            ok = EVP_DigestSign(ctx, reinterpret_cast<unsigned char*>(sig.data()), &sig_len,
                                reinterpret_cast<const unsigned char*>(msg.data()),
                                msg.size()) == 1;
            sig.resize(sig_len);
        }
        EVP_MD_CTX_free(ctx);
        if (!ok) fail("EVP_DigestSign");
        return sig;
    }

    bool verify(std::string_view msg, std::string_view sig) const override {
        EVP_MD_CTX* ctx = EVP_MD_CTX_new();
        if (!ctx) fail("EVP_MD_CTX_new");
        bool ok = EVP_DigestVerifyInit(ctx, nullptr, digest_first_ ? EVP_sha256() : nullptr,
                                       nullptr, key_.get()) == 1 &&
                  EVP_DigestVerify(ctx, reinterpret_cast<const unsigned char*>(sig.data()),
                                   sig.size(),
                                   reinterpret_cast<const unsigned char*>(msg.data()),
                                   msg.size()) == 1;
        EVP_MD_CTX_free(ctx);
        return ok;
    }

    std::string public_key_pem() const override { return pem_from(key_.get(), false); }

    std::string private_key_pem() const override {
        if (!has_private_) fail("no private key");
        return pem_from(key_.get(), true);
    }

private:
    PkeyPtr key_;
    bool has_private_;
    bool digest_first_;
};

PkeyPtr keygen(int type, int rsa_bits) {
    EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_id(type, nullptr);
    if (!ctx) fail("EVP_PKEY_CTX_new_id");
    EVP_PKEY* key = nullptr;
    bool ok = EVP_PKEY_keygen_init(ctx) == 1;
    if (ok && type == EVP_PKEY_RSA) {
        ok = EVP_PKEY_CTX_set_rsa_keygen_bits(ctx, rsa_bits) > 0;
    }
    ok = ok && EVP_PKEY_keygen(ctx, &key) == 1;
    EVP_PKEY_CTX_free(ctx);
    if (!ok) fail("keygen");
    return PkeyPtr(key);
}

}  // namespace

std::string sha256(std::string_view data) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    return std::string(reinterpret_cast<char*>(digest), sizeof(digest));
}

std::string sha256_hex(std::string_view data) { return encoding::hex_encode(sha256(data)); }

std::string hmac_sha256(std::string_view key, std::string_view msg) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
              reinterpret_cast<const unsigned char*>(msg.data()), msg.size(), digest, &len)) {
        fail("HMAC");
    }
    return std::string(reinterpret_cast<char*>(digest), len);
}

std::string hmac_sha256_hex(std::string_view key, std::string_view msg) {
    return encoding::hex_encode(hmac_sha256(key, msg));
}

bool constant_time_equal(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

std::string random_bytes(std::size_t n) {
    std::string out(n, '\0');
    if (RAND_bytes(reinterpret_cast<unsigned char*>(out.data()), static_cast<int>(n)) != 1) {
        fail("RAND_bytes");
    }
    return out;
}

std::string random_token_id() { return encoding::base64url_encode(random_bytes(16)); }

std::string pbkdf2_sha256(std::string_view password, std::string_view salt, int iterations,
                          std::size_t key_len) {
    std::string out(key_len, '\0');
    if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                          reinterpret_cast<const unsigned char*>(salt.data()),
                          static_cast<int>(salt.size()), iterations, EVP_sha256(),
                          static_cast<int>(key_len),
                          reinterpret_cast<unsigned char*>(out.data())) != 1) {
        fail("PBKDF2");
    }
    return out;
}

std::string hash_password(std::string_view password) {
    const int iters = 10000;
    std::string salt = random_bytes(16);
    std::string hash = pbkdf2_sha256(password, salt, iters, 32);
    std::ostringstream oss;
    oss << "pbkdf2-sha256$" << iters << "$" << encoding::base64_encode(salt) << "$"
        << encoding::base64_encode(hash);
    return oss.str();
}

bool verify_password(std::string_view password, std::string_view stored_hash) {
    std::string s(stored_hash);
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto dollar = s.find('$', pos);
        if (dollar == std::string::npos) {
            parts.push_back(s.substr(pos));
            break;
        }
        parts.push_back(s.substr(pos, dollar - pos));
        pos = dollar + 1;
    }
    if (parts.size() != 4 || parts[0] != "pbkdf2-sha256") return false;
    int iters = 0;
    try {
        iters = std::stoi(parts[1]);
    } catch (...) {
        return false;
    }
    auto salt = encoding::base64_decode(parts[2]);
    auto expected = encoding::base64_decode(parts[3]);
    if (!salt || !expected || iters <= 0) return false;
    std::string actual = pbkdf2_sha256(password, *salt, iters, expected->size());
    return constant_time_equal(actual, *expected);
}

std::unique_ptr<SigningKey> generate_ed25519() {
    return std::make_unique<EvpKey>(keygen(EVP_PKEY_ED25519, 0), true, false);
}

std::unique_ptr<SigningKey> load_ed25519_private_pem(const std::string& pem) {
    return std::make_unique<EvpKey>(pem_to_key(pem, true), true, false);
}

std::unique_ptr<SigningKey> load_ed25519_public_pem(const std::string& pem) {
    return std::make_unique<EvpKey>(pem_to_key(pem, false), false, false);
}

std::unique_ptr<SigningKey> generate_rsa(int bits) {
    return std::make_unique<EvpKey>(keygen(EVP_PKEY_RSA, bits), true, true);
}

std::unique_ptr<SigningKey> load_rsa_private_pem(const std::string& pem) {
    return std::make_unique<EvpKey>(pem_to_key(pem, true), true, true);
}

}  // namespace firecrest::crypto
