#pragma once

#include <memory>
#include <string>

#include "firecrest/app/application.hpp"

namespace httplib {
class Server;
}

namespace firecrest {

// Serves the gateway over HTTP/1.1. listen_async binds an ephemeral port
// when 0 is requested, which the tests use.
class HttpServer {
public:
    explicit HttpServer(Application& app);
    ~HttpServer();

    // Blocks until stop(). Respects the config's TLS toggle.
    bool listen(const std::string& host, int port);
    // Starts in a background thread; returns the bound port.
    int listen_async(const std::string& host, int port);
    void stop();

private:
    Application& app_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

}  // namespace firecrest
