#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "epcdisc/dead_drop.hpp"
#include "epcdisc/store.hpp"

namespace epcdisc {

struct ServiceConfig {
    std::string bind_address = "127.0.0.1";
    int port = 8080;
    std::string journal_path; // empty = in-memory only
    int sweep_interval_s = 60;
    std::size_t max_body_bytes = 1 << 20;
    int rate_limit_per_minute = 600; // per client address, fixed window

    void check() const
    {
        if (sweep_interval_s <= 0)
            throw std::invalid_argument("sweep interval must be positive");
        if (max_body_bytes < 64 * 1024)
            throw std::invalid_argument("max body size must be at least 64 KiB");
    }
};

inline WallTime system_wall_time()
{
    auto now = std::chrono::system_clock::now();
    std::int64_t s = std::chrono::duration_cast<std::chrono::seconds>(
                         now.time_since_epoch())
                         .count();
    std::time_t tt = s;
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &tm);
    return WallTime{s, buf};
}

/// Discovery service plus dead drop in one process; the two stores stay
/// disjoint. No response ever carries submitter identity, and GET /events
/// answers an empty array rather than 404 so absence of data is
/// indistinguishable from never-stored.
class DiscoveryService {
public:
    using Clock = std::function<WallTime()>;

    explicit DiscoveryService(ServiceConfig cfg, Clock clock = system_wall_time)
        : cfg_(std::move(cfg)), clock_(std::move(clock))
    {
        cfg_.check();
        if (!cfg_.journal_path.empty()) {
            std::ifstream f(cfg_.journal_path);
            if (f.good())
                store_.restore(f);
        }
        setup_routes();
    }

    DiscoveryStore& store() { return store_; }
    DeadDrop& dead_drop() { return drop_; }

    /// Blocks until stop() is called.
    bool run()
    {
        running_ = true;
        sweeper_ = std::thread([this] {
            while (running_) {
                for (int i = 0; i < cfg_.sweep_interval_s * 10 && running_; ++i)
                    std::this_thread::sleep_for(std::chrono::milliseconds(100));
                if (running_)
                    drop_.expire_sweep(clock_());
            }
        });
        bool ok = server_.listen(cfg_.bind_address, cfg_.port);
        running_ = false;
        if (sweeper_.joinable())
            sweeper_.join();
        return ok;
    }

    /// Binds to an ephemeral port and serves in a background thread; used by
    /// tests. Returns the bound port.
    int start_async()
    {
        int port = server_.bind_to_any_port(cfg_.bind_address);
        if (port < 0)
            throw std::runtime_error("failed to bind " + cfg_.bind_address);
        running_ = true;
        serving_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port;
    }

    void stop()
    {
        running_ = false;
        server_.stop();
        if (serving_.joinable())
            serving_.join();
        if (sweeper_.joinable())
            sweeper_.join();
    }

    ~DiscoveryService() { stop(); }

private:
    void setup_routes()
    {
        server_.set_payload_max_length(cfg_.max_body_bytes);

        server_.set_pre_routing_handler(
            [this](const httplib::Request& req, httplib::Response& res) {
                if (!check_rate(req.remote_addr)) {
                    res.status = 429;
                    res.set_content(R"({"error":"rate limit exceeded"})",
                                    "application/json");
                    return httplib::Server::HandlerResponse::Handled;
                }
                return httplib::Server::HandlerResponse::Unhandled;
            });

        server_.Post("/events", [this](const httplib::Request& req,
                                       httplib::Response& res) {
            std::string err;
            auto e = parse_sanitised_text(req.body, err);
            if (!e) {
                reply_error(res, 400, err);
                return;
            }
            try {
                auto r = store_.put(*e);
                if (r.inserted)
                    append_journal(*e);
                res.status = r.inserted ? 201 : 200;
                nlohmann::json body;
                body["eventId"] = r.event_id.render();
                res.set_content(body.dump(), "application/json");
            } catch (const std::runtime_error& ex) {
                reply_error(res, 409, ex.what());
            } catch (const std::invalid_argument& ex) {
                reply_error(res, 400, ex.what());
            }
        });

        server_.Get("/events", [this](const httplib::Request& req,
                                      httplib::Response& res) {
            auto hash = normalise_hash(req.get_param_value("hash"));
            if (!hash) {
                reply_error(res, 400, "hash: expected 64 hex chars");
                return;
            }
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const auto& e : store_.query_by_hash(*hash))
                arr.push_back(sanitised_to_json(e));
            res.set_content(arr.dump(), "application/json");
        });

        server_.Post("/dead_drop", [this](const httplib::Request& req,
                                          httplib::Response& res) {
            auto j = nlohmann::json::parse(req.body, nullptr, false);
            std::string err = "malformed JSON";
            std::optional<AccessRequest> r;
            if (!j.is_discarded())
                r = parse_access_request(j, err);
            if (!r) {
                reply_error(res, 400, err);
                return;
            }
            try {
                auto id = drop_.post_request(*r, clock_());
                res.status = 201;
                nlohmann::json body;
                body["requestId"] = id;
                res.set_content(body.dump(), "application/json");
            } catch (const std::invalid_argument& ex) {
                reply_error(res, 400, ex.what());
            }
        });

        server_.Get("/dead_drop", [this](const httplib::Request& req,
                                         httplib::Response& res) {
            auto hash = normalise_hash(req.get_param_value("hash"));
            if (!hash) {
                reply_error(res, 400, "hash: expected 64 hex chars");
                return;
            }
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const auto& r : drop_.poll_requests(*hash, clock_()))
                arr.push_back(access_request_to_json(r));
            res.set_content(arr.dump(), "application/json");
        });
    }

    static void reply_error(httplib::Response& res, int status, const std::string& msg)
    {
        res.status = status;
        nlohmann::json body;
        body["error"] = msg;
        res.set_content(body.dump(), "application/json");
    }

    static std::optional<std::string> normalise_hash(std::string h)
    {
        for (auto& c : h)
            if (c >= 'A' && c <= 'F')
                c = static_cast<char>(c - 'A' + 'a');
        if (!is_hex_digest(h))
            return std::nullopt;
        return h;
    }

    bool check_rate(const std::string& addr)
    {
        std::lock_guard lock(rate_mutex_);
        auto now = std::chrono::steady_clock::now();
        auto& slot = rate_[addr];
        if (now - slot.window_start > std::chrono::minutes(1)) {
            slot.window_start = now;
            slot.count = 0;
        }
        return ++slot.count <= cfg_.rate_limit_per_minute;
    }

    void append_journal(const SanitisedEvent& e)
    {
        if (cfg_.journal_path.empty())
            return;
        std::lock_guard lock(journal_mutex_);
        std::ofstream f(cfg_.journal_path, std::ios::binary | std::ios::app);
        f << serialize_sanitised(e) << '\n';
    }

    struct RateSlot {
        std::chrono::steady_clock::time_point window_start{};
        int count = 0;
    };

    ServiceConfig cfg_;
    Clock clock_;
    DiscoveryStore store_;
    DeadDrop drop_;
    httplib::Server server_;
    std::thread sweeper_;
    std::thread serving_;
    std::atomic<bool> running_{false};
    std::mutex rate_mutex_;
    std::mutex journal_mutex_;
    std::map<std::string, RateSlot> rate_;
};

} // namespace epcdisc
