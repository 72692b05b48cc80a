#pragma once

#include <memory>
#include <string>

#include "exposure/service.hpp"

namespace exposure {

// Serves Api over HTTP/1.1 with one thread per connection from the
// underlying pool. Request bodies and responses are JSON.
class HttpServer {
public:
    explicit HttpServer(const Api& api);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds to `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    bool listen_after_bind();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace exposure
