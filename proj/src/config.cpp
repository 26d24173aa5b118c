#include "firecrest/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace firecrest {

namespace {

template <typename T>
void get_if_present(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Config Config::from_json(const nlohmann::json& j) {
    Config c;
    if (j.contains("listen")) {
        const auto& l = j.at("listen");
        get_if_present(l, "host", c.listen_host);
        get_if_present(l, "port", c.listen_port);
        if (l.contains("tls")) {
            const auto& t = l.at("tls");
            get_if_present(t, "enabled", c.tls.enabled);
            get_if_present(t, "cert_file", c.tls.cert_file);
            get_if_present(t, "key_file", c.tls.key_file);
        }
    }
    get_if_present(j, "state_dir", c.state_dir);
    if (j.contains("identity")) {
        const auto& i = j.at("identity");
        get_if_present(i, "algorithm", c.identity.algorithm);
        get_if_present(i, "hs256_secret", c.identity.hs256_secret);
        get_if_present(i, "rsa_private_key_pem", c.identity.rsa_private_key_pem);
        get_if_present(i, "access_ttl_seconds", c.identity.access_ttl_seconds);
        get_if_present(i, "refresh_ttl_seconds", c.identity.refresh_ttl_seconds);
        if (i.contains("clients")) {
            for (const auto& e : i.at("clients")) {
                ClientRegistration r;
                r.client_id = e.at("client_id").get<std::string>();
                r.client_secret = e.at("client_secret").get<std::string>();
                get_if_present(e, "display_name", r.display_name);
                c.identity.clients.push_back(std::move(r));
            }
        }
        if (i.contains("users")) {
            for (const auto& e : i.at("users")) {
                UserEntry u;
                u.username = e.at("username").get<std::string>();
                u.password_hash = e.at("password_hash").get<std::string>();
                c.identity.users.push_back(std::move(u));
            }
        }
    }
    if (j.contains("delegation")) {
        const auto& d = j.at("delegation");
        get_if_present(d, "max_ttl_seconds", c.delegation.max_ttl_seconds);
        get_if_present(d, "ca_key_pem", c.delegation.ca_key_pem);
    }
    if (j.contains("machines")) {
        for (const auto& e : j.at("machines")) {
            MachineConfig m;
            m.name = e.at("name").get<std::string>();
            get_if_present(e, "slots", m.slots);
            get_if_present(e, "default_wall_time_seconds", m.default_wall_time_seconds);
            get_if_present(e, "clock", m.clock);
            c.machines.push_back(std::move(m));
        }
    }
    if (j.contains("storage")) {
        const auto& s = j.at("storage");
        get_if_present(s, "staging_secret", c.storage.staging_secret);
        get_if_present(s, "external_size_cap_bytes", c.storage.external_size_cap_bytes);
        get_if_present(s, "upload_url_ttl_seconds", c.storage.upload_url_ttl_seconds);
        get_if_present(s, "download_url_ttl_seconds", c.storage.download_url_ttl_seconds);
    }
    if (j.contains("utilities")) {
        const auto& u = j.at("utilities");
        get_if_present(u, "small_file_cap_bytes", c.utilities.small_file_cap_bytes);
        get_if_present(u, "timeout_seconds", c.utilities.timeout_seconds);
    }
    if (j.contains("tasks")) {
        get_if_present(j.at("tasks"), "snapshot_file", c.tasks.snapshot_file);
    }
    return c;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

std::string resolve_pem(const std::string& value) {
    if (value.rfind("-----BEGIN", 0) == 0) return value;
    std::ifstream in(value);
    if (!in) throw std::runtime_error("cannot open key file: " + value);
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

}  // namespace firecrest
