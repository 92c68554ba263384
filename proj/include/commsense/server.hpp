#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "commsense/service.hpp"

namespace commsense {

// HTTP transport for Api, plus static serving of the client bundle.
class HttpServer {
public:
    explicit HttpServer(Engine& engine, std::filesystem::path static_dir = {});
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds (port 0 picks a free port) and returns the bound port. Throws Error.
    int bind(const std::string& host, int port);
    // Serves until stop(); call after bind().
    void run();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace commsense
