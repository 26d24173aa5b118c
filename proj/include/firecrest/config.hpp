#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace firecrest {

struct ClientRegistration {
    std::string client_id;
    std::string client_secret;
    std::string display_name;
};

struct UserEntry {
    std::string username;
    std::string password_hash;  // pbkdf2-sha256$iters$salt$hash
};

struct IdentityConfig {
    std::string algorithm = "HS256";  // HS256 | RS256
    std::string hs256_secret;
    std::string rsa_private_key_pem;  // inline PEM or path, RS256 only
    std::int64_t access_ttl_seconds = 300;
    std::int64_t refresh_ttl_seconds = 1800;
    std::vector<ClientRegistration> clients;
    std::vector<UserEntry> users;
};

struct DelegationConfig {
    std::int64_t max_ttl_seconds = 300;
    std::string ca_key_pem;  // inline PEM or path; generated when empty
};

struct MachineConfig {
    std::string name;
    int slots = 2;
    std::int64_t default_wall_time_seconds = 60;
    std::string clock = "manual";  // manual | wallclock
};

struct StorageConfig {
    std::string staging_secret;
    std::uint64_t external_size_cap_bytes = 5ull * 1024 * 1024 * 1024;
    std::int64_t upload_url_ttl_seconds = 7 * 24 * 3600;
    std::int64_t download_url_ttl_seconds = 24 * 3600;
};

struct UtilitiesConfig {
    std::uint64_t small_file_cap_bytes = 5 * 1024 * 1024;
    std::int64_t timeout_seconds = 5;
};

struct TasksConfig {
    std::string snapshot_file;  // optional persistence across restarts
};

struct TlsConfig {
    bool enabled = false;
    std::string cert_file;
    std::string key_file;
};

struct Config {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8000;
    TlsConfig tls;
    std::string state_dir = "./state";
    IdentityConfig identity;
    DelegationConfig delegation;
    std::vector<MachineConfig> machines;
    StorageConfig storage;
    UtilitiesConfig utilities;
    TasksConfig tasks;

    static Config from_json(const nlohmann::json& j);
    static Config load_file(const std::string& path);
};

// Accepts either an inline PEM blob or a filesystem path to one.
std::string resolve_pem(const std::string& value);

}  // namespace firecrest
