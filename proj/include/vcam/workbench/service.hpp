#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace vcam::workbench {

struct ServiceOptions {
    std::uint64_t scene_seed = 0;  // default scene for /api/run and /api/generate
    int workers = 1;
};

struct HttpResponse {
    int status = 200;
    std::string body;  // JSON
};

/// Route handling without sockets. Errors come back as {error, detail} with
/// a field path under "field" when the failure names one.
class Service {
public:
    explicit Service(ServiceOptions options = {}) : options_(options) {}

    HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

private:
    ServiceOptions options_;
    std::mutex run_mutex_;  // /api/run jobs execute one at a time
};

/// httplib front end for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();

private:
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace vcam::workbench
