#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "firecrest/app/http_server.hpp"
#include "firecrest/util/crypto.hpp"

namespace {

firecrest::HttpServer* g_server = nullptr;

void handle_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"firecrest-server: HTTP gateway plus simulated HPC backends"};
    std::string config_path = "config/server.json";
    app.add_option("-c,--config", config_path, "path to the JSON config file")
        ->envname("FIRECREST_CONFIG");

    bool hash_password = false;
    app.add_flag("--hash-password", hash_password,
                 "read a password from stdin and print a config-ready hash");

    CLI11_PARSE(app, argc, argv);

    if (hash_password) {
        std::string password;
        std::getline(std::cin, password);
        std::cout << firecrest::crypto::hash_password(password) << "\n";
        return 0;
    }

    try {
        auto config = firecrest::Config::load_file(config_path);
        firecrest::Application application(config);
        firecrest::HttpServer server(application);
        g_server = &server;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);

        std::printf("listening on %s://%s:%d\n", config.tls.enabled ? "https" : "http",
                    config.listen_host.c_str(), config.listen_port);
        std::printf("machines:");
        for (const auto& name : application.machines().names()) {
            std::printf(" %s", name.c_str());
        }
        std::printf("\n");
        std::fflush(stdout);
        if (!server.listen(config.listen_host, config.listen_port)) {
            std::fprintf(stderr, "error: cannot listen on %s:%d\n", config.listen_host.c_str(),
                         config.listen_port);
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
