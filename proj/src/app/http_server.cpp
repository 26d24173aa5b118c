#include "firecrest/app/http_server.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace firecrest {

namespace {

http::ApiRequest to_api_request(const httplib::Request& req) {
    http::ApiRequest out;
    out.method = req.method;
    out.path = req.path;
    for (const auto& [name, value] : req.headers) {
        std::string lower = name;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        out.headers[lower] = value;
    }
    for (const auto& [name, value] : req.params) {
        out.query[name] = value;
        out.form[name] = value;
    }
    out.body = req.body;
    out.content_type = req.get_header_value("Content-Type");
    for (const auto& [name, part] : req.files) {
        if (!part.filename.empty()) {
            out.files[name] = {part.filename, part.content};
        } else {
            out.form[name] = part.content;
        }
    }
    return out;
}

void fill_response(const http::ApiResponse& in, httplib::Response& out) {
    out.status = in.status;
    for (const auto& [name, value] : in.headers) out.set_header(name, value);
    out.set_content(in.body, in.content_type);
}

}  // namespace

HttpServer::HttpServer(Application& app) : app_(app) {
    const auto& tls = app.config().tls;
    if (tls.enabled) {
        if (tls.cert_file.empty() || tls.key_file.empty()) {
            throw std::runtime_error("TLS enabled but cert_file/key_file not configured");
        }
        server_ = std::make_unique<httplib::SSLServer>(tls.cert_file.c_str(),
                                                       tls.key_file.c_str());
    } else {
        server_ = std::make_unique<httplib::Server>();
    }

    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        fill_response(app_.handle(to_api_request(req)), res);
    };
    server_->Get(".*", dispatch);
    server_->Post(".*", dispatch);
    server_->Put(".*", dispatch);
    server_->Delete(".*", dispatch);
    server_->Options(".*", dispatch);
    server_->Patch(".*", dispatch);
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) {
    return server_->listen(host, port);
}

int HttpServer::listen_async(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
        if (bound <= 0) throw std::runtime_error("cannot bind HTTP listener");
        thread_ = std::thread([this] { server_->listen_after_bind(); });
    } else {
        if (!server_->bind_to_port(host, port)) {
            throw std::runtime_error("cannot bind HTTP listener");
        }
        thread_ = std::thread([this] { server_->listen_after_bind(); });
    }
    server_->wait_until_ready();
    return bound;
}

void HttpServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace firecrest
