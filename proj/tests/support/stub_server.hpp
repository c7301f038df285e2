#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

namespace ehc::testing {

/// Local HTTP server on an ephemeral port. Every POST goes to `handler`.
class StubServer {
public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

    explicit StubServer(Handler handler) : handler_(std::move(handler)) {
        server_.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
            int call = 0;
            {
                std::lock_guard lock(mutex_);
                bodies_.push_back(req.body);
                auth_.push_back(req.get_header_value("Authorization"));
                call = static_cast<int>(bodies_.size());
            }
            handler_(req, res, call);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    std::string url(const std::string& path = "/v1/chat/completions") const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

    int calls() const {
        std::lock_guard lock(mutex_);
        return static_cast<int>(bodies_.size());
    }

    std::vector<std::string> bodies() const {
        std::lock_guard lock(mutex_);
        return bodies_;
    }

    std::vector<std::string> auth_headers() const {
        std::lock_guard lock(mutex_);
        return auth_;
    }

private:
    Handler handler_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::vector<std::string> bodies_;
    std::vector<std::string> auth_;
};

}  // namespace ehc::testing
