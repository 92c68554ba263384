#include "commsense/server.hpp"

#include <httplib.h>

#include "commsense/error.hpp"
#include "commsense/log.hpp"

namespace commsense {

struct HttpServer::Impl {
    explicit Impl(Engine& e) : api(e) {}
    Api api;
    httplib::Server server;
};

HttpServer::HttpServer(Engine& engine, std::filesystem::path static_dir) : impl_(std::make_unique<Impl>(engine)) {
    auto& srv = impl_->server;
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        ApiRequest ar{req.method, req.path, {}, req.body};
        for (const auto& [k, v] : req.params) ar.query.emplace(k, v);
        const auto out = impl_->api.handle(ar);
        res.status = out.status;
        if (out.seq) res.set_header("X-Commsense-Seq", std::to_string(*out.seq));
        res.set_content(out.body, out.content_type);
    };
    const char* pattern = R"(/(healthz|readyz|api(/.*)?))";
    srv.Get(pattern, handler);
    srv.Post(pattern, handler);
    srv.Put(pattern, handler);
    srv.Delete(pattern, handler);
    if (!static_dir.empty()) {
        if (!srv.set_mount_point("/", static_dir.string())) {
            log::warning("static directory " + static_dir.string() + " does not exist; not serving a client");
        }
    }
    srv.set_logger([](const httplib::Request& req, const httplib::Response& res) {
        log::write(log::Level::debug, req.method + " " + req.path + " " + std::to_string(res.status));
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    auto& srv = impl_->server;
    if (port == 0) {
        const int bound = srv.bind_to_any_port(host);
        if (bound < 0) throw Error("cannot bind " + host);
        return bound;
    }
    if (!srv.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

} // namespace commsense
