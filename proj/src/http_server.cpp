#include "exposure/http_server.hpp"

#include <httplib.h>

namespace exposure {

struct HttpServer::Impl {
    const Api& api;
    httplib::Server server;

    explicit Impl(const Api& a) : api(a) {
        auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
            std::string target = req.path;
            if (!req.params.empty()) {
                std::string query;
                for (const auto& [key, value] : req.params) {
                    if (!query.empty()) query += '&';
                    query += key + "=" + value;
                }
                target += "?" + query;
            }
            const ApiResponse out = api.handle(req.method, target, req.body);
            res.status = out.status;
            res.set_content(out.body.dump() + "\n", "application/json");
        };
        const std::string any = R"(/.*)";
        server.Get(any, dispatch);
        server.Post(any, dispatch);
        server.Put(any, dispatch);
        server.Delete(any, dispatch);
        server.Patch(any, dispatch);
    }
};

HttpServer::HttpServer(const Api& api) : impl_(std::make_unique<Impl>(api)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace exposure
